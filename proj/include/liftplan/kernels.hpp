#pragma once

#include <cstddef>

namespace liftplan::kern {

// Vector kernels behind every inner loop in the toolkit. Reductions use a
// fixed 4-lane accumulation order so the scalar and AVX2 paths produce
// bit-identical results; the equivalence test compares them exactly.
struct Kernels {
  const char* name;
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sumsq)(const double* x, std::size_t n);
  // y += a*x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*scale)(double a, double* x, std::size_t n);
  // y = M x, M row-major rows x cols
  void (*matvec)(const double* m, std::size_t rows, std::size_t cols,
                 const double* x, double* y);
  // y = M^T x
  void (*matvec_t)(const double* m, std::size_t rows, std::size_t cols,
                   const double* x, double* y);
};

const Kernels& scalar_kernels();

// nullptr when the CPU or the build does not support AVX2.
const Kernels* avx2_kernels();

// Selected once per process: AVX2 when available, else scalar. The
// LIFTPLAN_KERNELS environment variable ("scalar" or "avx2") overrides.
const Kernels& active();

}  // namespace liftplan::kern
