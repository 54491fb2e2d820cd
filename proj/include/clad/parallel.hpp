#pragma once

#include <cstddef>

namespace clad {

// Process-wide worker count for the data-parallel loops. Every parallel loop
// partitions disjoint output rows, so results are identical for any count.
void set_num_threads(int n);
int num_threads();

namespace detail {
void parallel_for_impl(std::size_t begin, std::size_t end, void* fn,
                       void (*trampoline)(void*, std::size_t, std::size_t));
}

template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn) {
  auto trampoline = [](void* f, std::size_t lo, std::size_t hi) {
    auto& body = *static_cast<Fn*>(f);
    for (std::size_t i = lo; i < hi; ++i) body(i);
  };
  detail::parallel_for_impl(begin, end, &fn, trampoline);
}

}  // namespace clad
