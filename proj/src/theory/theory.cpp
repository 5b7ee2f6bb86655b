#include "liftplan/theory.hpp"

#include <cmath>

namespace liftplan::theory {
namespace {

void check_sys(const LinearPlanSystem& sys) {
  if (sys.A.rows != sys.A.cols) throw std::invalid_argument("linear system: A must be square");
  if (sys.B.rows != sys.A.rows) throw std::invalid_argument("linear system: B rows mismatch");
  if (sys.horizon < 1) throw std::invalid_argument("linear system: horizon must be >= 1");
}

void place_block(DenseMatrix& m, std::size_t r0, std::size_t c0,
                 const DenseMatrix& blk, double sign) {
  for (std::size_t i = 0; i < blk.rows; ++i)
    for (std::size_t j = 0; j < blk.cols; ++j) m(r0 + i, c0 + j) = sign * blk(i, j);
}

}  // namespace

DenseMatrix controllability(const LinearPlanSystem& sys) {
  check_sys(sys);
  const std::size_t n = sys.A.rows, m = sys.B.cols, T = sys.horizon;
  DenseMatrix c(n, m * T);
  DenseMatrix cur = sys.B;  // A^j B, rightmost block first
  for (std::size_t j = 0; j < T; ++j) {
    place_block(c, 0, (T - 1 - j) * m, cur, 1.0);
    if (j + 1 < T) cur = matmul(sys.A, cur);
  }
  return c;
}

LiftedSystem lifted_matrix(const LinearPlanSystem& sys) {
  check_sys(sys);
  const std::size_t T = sys.horizon;
  if (T < 2)
    throw std::invalid_argument("lifted_matrix: T must be >= 2 (no free states at T = 1)");
  if (sys.s0.size() != sys.A.rows || sys.g.size() != sys.A.rows)
    throw std::invalid_argument("lifted_matrix: boundary state dims mismatch");
  const std::size_t n = sys.A.rows, m = sys.B.cols;
  const std::size_t state_cols = n * (T - 1);
  const DenseMatrix eye = DenseMatrix::identity(n);

  LiftedSystem out;
  out.M = DenseMatrix(n * T, state_cols + m * T);
  out.b.assign(n * T, 0.0);

  // t = 0: s_1 - B a_0 = A s0
  place_block(out.M, 0, 0, eye, 1.0);
  place_block(out.M, 0, state_cols, sys.B, -1.0);
  const Vec as0 = matvec(sys.A, sys.s0);
  std::copy(as0.begin(), as0.end(), out.b.begin());

  // 0 < t < T-1: A s_t + B a_t - s_{t+1} = 0
  for (std::size_t t = 1; t + 1 < T; ++t) {
    place_block(out.M, t * n, (t - 1) * n, sys.A, 1.0);
    place_block(out.M, t * n, t * n, eye, -1.0);
    place_block(out.M, t * n, state_cols + t * m, sys.B, 1.0);
  }

  // t = T-1: -A s_{T-1} - B a_{T-1} = -g
  place_block(out.M, (T - 1) * n, (T - 2) * n, sys.A, -1.0);
  place_block(out.M, (T - 1) * n, state_cols + (T - 1) * m, sys.B, -1.0);
  for (std::size_t i = 0; i < n; ++i) out.b[(T - 1) * n + i] = -sys.g[i];

  return out;
}

std::vector<std::size_t> interleaved_order(std::size_t n, std::size_t m, std::size_t T) {
  if (T < 2) throw std::invalid_argument("interleaved_order: T must be >= 2");
  const std::size_t state_cols = n * (T - 1);
  std::vector<std::size_t> perm;
  perm.reserve(state_cols + m * T);
  for (std::size_t t = 0; t + 1 < T; ++t) {
    for (std::size_t i = 0; i < n; ++i) perm.push_back(t * n + i);             // s_{t+1}
    for (std::size_t i = 0; i < m; ++i) perm.push_back(state_cols + t * m + i);  // a_t
  }
  for (std::size_t i = 0; i < m; ++i) perm.push_back(state_cols + (T - 1) * m + i);
  return perm;
}

SmoothnessReport smoothness_report(const LinearPlanSystem& sys, const ModeDirection* mode) {
  check_sys(sys);
  if (sys.horizon < 2) throw std::invalid_argument("smoothness_report: T must be >= 2");

  SmoothnessReport rep;
  const DenseMatrix c = controllability(sys);
  const double c_norm = spectral_norm(c, 1e-9);
  rep.shooting_lipschitz = 2.0 * c_norm * c_norm;

  const LiftedSystem lifted = lifted_matrix(sys);
  const double m_norm = spectral_norm(lifted.M, 1e-7);
  rep.lifted_lipschitz = 2.0 * m_norm * m_norm;

  const double na = spectral_norm(sys.A, 1e-10);
  const double nb = spectral_norm(sys.B, 1e-10);
  rep.lifted_upper_bound = 6.0 * (1.0 + na * na + nb * nb);

  if (mode) {
    if (mode->v.size() != sys.A.rows || mode->w.size() != sys.B.cols)
      throw std::invalid_argument("smoothness_report: mode direction dims mismatch");
    Vec v = mode->v;
    const double nv = norm2(v);
    if (nv == 0.0) throw std::invalid_argument("smoothness_report: zero eigenvector");
    scale_inplace(1.0 / nv, v);
    // left eigenvector: A^T v = lambda v, certified to 1e-8
    Vec atv = matvec_t(sys.A, v);
    axpy(-mode->lambda, v, atv);
    if (norm2(atv) > 1e-8)
      throw std::invalid_argument("smoothness_report: (v, lambda) is not a left eigenpair of A");
    Vec w = mode->w;
    const double nw = norm2(w);
    if (nw == 0.0) throw std::invalid_argument("smoothness_report: zero action direction");
    scale_inplace(1.0 / nw, w);
    const double mu = std::abs(dot(v, matvec(sys.B, w)));
    if (mu <= 0.0) throw std::invalid_argument("smoothness_report: mode has zero projection");
    rep.shooting_lower_bound =
        2.0 * mu * mu * std::pow(std::abs(mode->lambda), 2.0 * (static_cast<double>(sys.horizon) - 1.0));
  }
  return rep;
}

DenseMatrix stopgrad_block_hessian(const DenseMatrix& B, double beta) {
  if (beta < 0.0) throw std::invalid_argument("stopgrad_block_hessian: beta must be >= 0");
  const std::size_t n = B.rows, m = B.cols;
  DenseMatrix h(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i) h(i, i) = 2.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      h(i, n + j) = -2.0 * B(i, j);
      h(n + j, i) = -2.0 * B(i, j);
    }
  const DenseMatrix btb = gram(B);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) h(n + i, n + j) = 2.0 * (1.0 + beta) * btb(i, j);
  return h;
}

double gauss_norm_mean(std::size_t d) {
  if (d < 1) throw std::invalid_argument("gauss_norm_mean: d must be >= 1");
  const double dd = static_cast<double>(d);
  return std::sqrt(2.0) * std::exp(std::lgamma((dd + 1.0) / 2.0) - std::lgamma(dd / 2.0));
}

}  // namespace liftplan::theory
