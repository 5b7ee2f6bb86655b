#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace liftplan {

using Vec = std::vector<double>;

// Row-major dense matrix. Stays dense at desk scale; no sparse storage.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diag(std::span<const double> d);

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data).subspan(i * cols, cols);
  }
};

// Kernel-backed vector helpers.
double dot(std::span<const double> x, std::span<const double> y);
double sumsq(std::span<const double> x);
double norm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);  // y += a*x
void scale_inplace(double a, std::span<double> x);
Vec sub(std::span<const double> x, std::span<const double> y);  // x - y
Vec add(std::span<const double> x, std::span<const double> y);
Vec scaled(double a, std::span<const double> x);
bool all_finite(std::span<const double> x);

// Fixed-topology pairwise tree reduction; bit-stable for a given length.
double pairwise_sum(std::span<const double> x);

Vec matvec(const DenseMatrix& m, std::span<const double> x);
Vec matvec_t(const DenseMatrix& m, std::span<const double> x);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& m);
DenseMatrix gram(const DenseMatrix& m);  // m^T m
double max_abs(const DenseMatrix& m);

}  // namespace liftplan
