#pragma once
// Dense inner-loop kernels with a scalar reference path and an AVX2 path.
// The active backend is chosen once at startup from CPUID; set
// ZOLLFORGE_SIMD=scalar to force the reference path.

#include <cstddef>
#include <string_view>

namespace zf::kern {

enum class Backend { Scalar, Avx2 };

struct Table {
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y = A x, A row-major rows x cols
  void (*gemv)(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
  // y = A^T x, A row-major rows x cols, y has cols entries
  void (*gemv_t)(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
};

const Table& scalar_table();
const Table* avx2_table();  // nullptr when not compiled in

bool cpu_has_avx2();
Backend active_backend();
void set_backend(Backend b);  // falls back to scalar if unavailable
std::string_view backend_name(Backend b);

const Table& table();

inline double dot(const double* x, const double* y, std::size_t n) { return table().dot(x, y, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { table().axpy(a, x, y, n); }
inline void gemv(const double* A, std::size_t r, std::size_t c, const double* x, double* y) {
  table().gemv(A, r, c, x, y);
}
inline void gemv_t(const double* A, std::size_t r, std::size_t c, const double* x, double* y) {
  table().gemv_t(A, r, c, x, y);
}

}  // namespace zf::kern
