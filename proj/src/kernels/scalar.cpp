#include "zollforge/kernels.hpp"

namespace zf::kern {
namespace {

double dot_s(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_s(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void gemv_s(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_s(A + r * cols, x, cols);
}

void gemv_t_s(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy_s(x[r], A + r * cols, y, cols);
}

const Table kScalar{dot_s, axpy_s, gemv_s, gemv_t_s};

}  // namespace

const Table& scalar_table() { return kScalar; }

}  // namespace zf::kern
