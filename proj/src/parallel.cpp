#include "clad/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace clad {

namespace {
int g_threads = 1;
}

void set_num_threads(int n) { g_threads = std::max(1, n); }
int num_threads() { return g_threads; }

namespace detail {

void parallel_for_impl(std::size_t begin, std::size_t end, void* fn,
                       void (*trampoline)(void*, std::size_t, std::size_t)) {
  const std::size_t n = end > begin ? end - begin : 0;
  const std::size_t workers = std::min<std::size_t>(g_threads, n);
  if (workers <= 1) {
    trampoline(fn, begin, end);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = begin + w * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(trampoline, fn, lo, hi);
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail
}  // namespace clad
