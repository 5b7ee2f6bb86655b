#include "liftplan/dense.hpp"

#include <cmath>
#include <stdexcept>

#include "liftplan/kernels.hpp"

namespace liftplan {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diag(std::span<const double> d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  return kern::active().dot(x.data(), y.data(), x.size());
}

double sumsq(std::span<const double> x) {
  return kern::active().sumsq(x.data(), x.size());
}

double norm2(std::span<const double> x) { return std::sqrt(sumsq(x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  kern::active().axpy(a, x.data(), y.data(), x.size());
}

void scale_inplace(double a, std::span<double> x) {
  kern::active().scale(a, x.data(), x.size());
}

Vec sub(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("sub: size mismatch");
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return out;
}

Vec add(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("add: size mismatch");
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return out;
}

Vec scaled(double a, std::span<const double> x) {
  Vec out(x.begin(), x.end());
  scale_inplace(a, out);
  return out;
}

bool all_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

double pairwise_sum(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

Vec matvec(const DenseMatrix& m, std::span<const double> x) {
  if (x.size() != m.cols) throw std::invalid_argument("matvec: size mismatch");
  Vec y(m.rows);
  kern::active().matvec(m.data.data(), m.rows, m.cols, x.data(), y.data());
  return y;
}

Vec matvec_t(const DenseMatrix& m, std::span<const double> x) {
  if (x.size() != m.rows) throw std::invalid_argument("matvec_t: size mismatch");
  Vec y(m.cols);
  kern::active().matvec_t(m.data.data(), m.rows, m.cols, x.data(), y.data());
  return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: size mismatch");
  DenseMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      kern::active().axpy(aik, b.data.data() + k * b.cols, c.data.data() + i * c.cols, b.cols);
    }
  return c;
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

DenseMatrix gram(const DenseMatrix& m) { return matmul(transpose(m), m); }

double max_abs(const DenseMatrix& m) {
  double v = 0.0;
  for (double e : m.data) v = std::max(v, std::abs(e));
  return v;
}

}  // namespace liftplan
