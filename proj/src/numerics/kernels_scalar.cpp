#include "liftplan/kernels.hpp"

// Reference kernels. The reductions keep four independent accumulators and
// combine them as ((a0+a2)+(a1+a3))+tail, matching the AVX2 horizontal-add
// tree lane for lane; compiled with -ffp-contract=off so no FMA sneaks in.

namespace liftplan::kern {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t(3);
  for (; i < n4; i += 4) {
    a0 += x[i] * y[i];
    a1 += x[i + 1] * y[i + 1];
    a2 += x[i + 2] * y[i + 2];
    a3 += x[i + 3] * y[i + 3];
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return ((a0 + a2) + (a1 + a3)) + tail;
}

double sumsq_scalar(const double* x, std::size_t n) { return dot_scalar(x, x, n); }

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void matvec_scalar(const double* m, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = dot_scalar(m + i * cols, x, cols);
}

void matvec_t_scalar(const double* m, std::size_t rows, std::size_t cols,
                     const double* x, double* y) {
  for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) axpy_scalar(x[i], m + i * cols, y, cols);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k = {
      "scalar",      dot_scalar,    sumsq_scalar,
      axpy_scalar,   scale_scalar,  matvec_scalar,
      matvec_t_scalar,
  };
  return k;
}

}  // namespace liftplan::kern
