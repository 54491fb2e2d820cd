#include "clad/matrix.hpp"

#include <cmath>

#include "clad/errors.hpp"
#include "clad/parallel.hpp"

namespace clad {

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw NumericError("matmul: inner dimensions differ");
  Matrix out(a.rows, b.cols);
  parallel_for(0, a.rows, [&](std::size_t i) {
    const double* arow = a.data.data() + i * a.cols;
    double* orow = out.data.data() + i * out.cols;
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double av = arow[k];
      if (av == 0.0) continue;
      const double* brow = b.data.data() + k * b.cols;
      for (std::size_t j = 0; j < b.cols; ++j) orow[j] += av * brow[j];
    }
  });
  return out;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw NumericError("matmul_at_b: row counts differ");
  Matrix out(a.cols, b.cols);
  // out(f, j) = sum_n a(n, f) * b(n, j); rows of `out` are independent and the
  // inner n-loop runs in fixed order, so accumulation is deterministic.
  parallel_for(0, a.cols, [&](std::size_t f) {
    double* orow = out.data.data() + f * out.cols;
    for (std::size_t n = 0; n < a.rows; ++n) {
      const double av = a.data[n * a.cols + f];
      if (av == 0.0) continue;
      const double* brow = b.data.data() + n * b.cols;
      for (std::size_t j = 0; j < b.cols; ++j) orow[j] += av * brow[j];
    }
  });
  return out;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) throw NumericError("matmul_a_bt: column counts differ");
  Matrix out(a.rows, b.rows);
  parallel_for(0, a.rows, [&](std::size_t i) {
    const double* arow = a.data.data() + i * a.cols;
    double* orow = out.data.data() + i * out.cols;
    for (std::size_t j = 0; j < b.rows; ++j) {
      const double* brow = b.data.data() + j * b.cols;
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
      orow[j] = acc;
    }
  });
  return out;
}

double frobenius_squared(const Matrix& m) {
  double acc = 0.0;
  for (const double v : m.data) acc += v * v;
  return acc;
}

bool all_finite(const Matrix& m) {
  for (const double v : m.data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace clad
