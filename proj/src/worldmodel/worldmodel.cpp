#include "liftplan/worldmodel.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "liftplan/kernels.hpp"

namespace liftplan {

void WorldModel::check_dims(std::span<const double> s, std::span<const double> a) const {
  if (s.size() != state_dim()) throw std::invalid_argument("world model: state dim mismatch");
  if (a.size() != action_dim()) throw std::invalid_argument("world model: action dim mismatch");
}

Vec WorldModel::forward(std::span<const double> s, std::span<const double> a) const {
  check_dims(s, a);
  Vec out(state_dim());
  forward_into(s, a, out);
  return out;
}

Vec WorldModel::vjp_state(std::span<const double> s, std::span<const double> a,
                          std::span<const double> cot) const {
  check_dims(s, a);
  if (cot.size() != state_dim()) throw std::invalid_argument("vjp_state: cotangent dim mismatch");
  Vec out(state_dim());
  vjp_state_into(s, a, cot, out);
  return out;
}

Vec WorldModel::vjp_action(std::span<const double> s, std::span<const double> a,
                           std::span<const double> cot) const {
  check_dims(s, a);
  if (cot.size() != state_dim()) throw std::invalid_argument("vjp_action: cotangent dim mismatch");
  Vec out(action_dim());
  vjp_action_into(s, a, cot, out);
  return out;
}

// ---------------------------------------------------------------------------
// LinearModel

LinearModel::LinearModel(DenseMatrix A, DenseMatrix B, Vec c)
    : A_(std::move(A)), B_(std::move(B)), c_(std::move(c)) {
  if (A_.rows != A_.cols) throw std::invalid_argument("LinearModel: A must be square");
  if (B_.rows != A_.rows) throw std::invalid_argument("LinearModel: B row count must match A");
  if (c_.empty()) c_.assign(A_.rows, 0.0);
  if (c_.size() != A_.rows) throw std::invalid_argument("LinearModel: offset dim mismatch");
}

void LinearModel::forward_into(std::span<const double> s, std::span<const double> a,
                               std::span<double> out) const {
  Vec y = matvec(A_, s);
  kern::active().matvec(B_.data.data(), B_.rows, B_.cols, a.data(), out.data());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] += y[i] + c_[i];
}

void LinearModel::vjp_state_into(std::span<const double>, std::span<const double>,
                                 std::span<const double> cot, std::span<double> out) const {
  kern::active().matvec_t(A_.data.data(), A_.rows, A_.cols, cot.data(), out.data());
}

void LinearModel::vjp_action_into(std::span<const double>, std::span<const double>,
                                  std::span<const double> cot, std::span<double> out) const {
  kern::active().matvec_t(B_.data.data(), B_.rows, B_.cols, cot.data(), out.data());
}

// ---------------------------------------------------------------------------
// WallWorld

WallWorld::WallWorld(std::vector<WallSegment> walls, double stiffness, double step_scale,
                     double action_limit)
    : walls_(std::move(walls)), stiffness_(stiffness), step_scale_(step_scale),
      action_limit_(action_limit) {
  for (const auto& w : walls_)
    if (w.thickness <= 0.0) throw std::invalid_argument("WallWorld: thickness must be > 0");
}

void WallWorld::saturate(const double a[2], double u[2], double jac[4]) const {
  const double lim = action_limit_;
  if (lim <= 0.0) {
    u[0] = a[0];
    u[1] = a[1];
    if (jac) {
      jac[0] = jac[3] = 1.0;
      jac[1] = jac[2] = 0.0;
    }
    return;
  }
  const double r = std::sqrt(a[0] * a[0] + a[1] * a[1]);
  if (r < 1e-12) {
    u[0] = a[0];
    u[1] = a[1];
    if (jac) {
      jac[0] = jac[3] = 1.0;
      jac[1] = jac[2] = 0.0;
    }
    return;
  }
  const double th = std::tanh(r / lim);
  const double t = lim * th;       // saturated radius
  const double tr = t / r;         // tangential gain
  const double tp = 1.0 - th * th; // radial gain, sech^2
  u[0] = tr * a[0];
  u[1] = tr * a[1];
  if (jac) {
    // tr (I - aa^T/r^2) + tp aa^T/r^2
    const double inv_r2 = 1.0 / (r * r);
    jac[0] = tr + (tp - tr) * a[0] * a[0] * inv_r2;
    jac[1] = (tp - tr) * a[0] * a[1] * inv_r2;
    jac[2] = jac[1];
    jac[3] = tr + (tp - tr) * a[1] * a[1] * inv_r2;
  }
}

void WallWorld::push_at(const double q[2], double push[2], double jac[4]) const {
  push[0] = push[1] = 0.0;
  if (jac) jac[0] = jac[1] = jac[2] = jac[3] = 0.0;

  for (const auto& w : walls_) {
    const double ex = w.x2 - w.x1, ey = w.y2 - w.y1;
    const double len2 = ex * ex + ey * ey;
    double t = 0.0;
    if (len2 > 0.0) {
      t = ((q[0] - w.x1) * ex + (q[1] - w.y1) * ey) / len2;
      t = std::clamp(t, 0.0, 1.0);
    }
    const bool interior = len2 > 0.0 && t > 0.0 && t < 1.0;
    const double cx = w.x1 + t * ex, cy = w.y1 + t * ey;
    const double nx = q[0] - cx, ny = q[1] - cy;
    const double d2 = nx * nx + ny * ny;
    const double tau2 = w.thickness * w.thickness;
    const double u = 1.0 - d2 / tau2;
    if (u <= 0.0) continue;

    // Phi = (kappa*tau^2/6) u^3  =>  -grad(Phi) = kappa u^2 n
    const double k = stiffness_;
    push[0] += k * u * u * nx;
    push[1] += k * u * u * ny;

    if (jac) {
      // d push / d q = kappa (2u n du^T + u^2 dn/dq), du/dq = -2 n / tau^2,
      // dn/dq = I - e e^T on the segment interior, I past the endpoints.
      const double c1 = -4.0 * k * u / tau2;
      jac[0] += c1 * nx * nx;
      jac[1] += c1 * nx * ny;
      jac[2] += c1 * ny * nx;
      jac[3] += c1 * ny * ny;
      const double c2 = k * u * u;
      if (interior) {
        const double inv = 1.0 / len2;
        jac[0] += c2 * (1.0 - ex * ex * inv);
        jac[1] += c2 * (-ex * ey * inv);
        jac[2] += c2 * (-ey * ex * inv);
        jac[3] += c2 * (1.0 - ey * ey * inv);
      } else {
        jac[0] += c2;
        jac[3] += c2;
      }
    }
  }
}

void WallWorld::forward_into(std::span<const double> s, std::span<const double> a,
                             std::span<double> out) const {
  const double a_in[2] = {a[0], a[1]};
  double u[2];
  saturate(a_in, u, nullptr);
  const double q[2] = {s[0] + step_scale_ * u[0], s[1] + step_scale_ * u[1]};
  double push[2];
  push_at(q, push, nullptr);
  out[0] = q[0] + push[0];
  out[1] = q[1] + push[1];
}

void WallWorld::vjp_state_into(std::span<const double> s, std::span<const double> a,
                               std::span<const double> cot, std::span<double> out) const {
  const double a_in[2] = {a[0], a[1]};
  double u[2];
  saturate(a_in, u, nullptr);
  const double q[2] = {s[0] + step_scale_ * u[0], s[1] + step_scale_ * u[1]};
  double push[2], jac[4];
  push_at(q, push, jac);
  // dF/ds = I + dpush/dq; out = (dF/ds)^T cot
  out[0] = (1.0 + jac[0]) * cot[0] + jac[2] * cot[1];
  out[1] = jac[1] * cot[0] + (1.0 + jac[3]) * cot[1];
}

void WallWorld::vjp_action_into(std::span<const double> s, std::span<const double> a,
                                std::span<const double> cot, std::span<double> out) const {
  Vec dq(2);
  vjp_state_into(s, a, cot, dq);  // (I + dpush/dq)^T cot
  const double a_in[2] = {a[0], a[1]};
  double u[2], sat_jac[4];
  saturate(a_in, u, sat_jac);
  out[0] = step_scale_ * (sat_jac[0] * dq[0] + sat_jac[2] * dq[1]);
  out[1] = step_scale_ * (sat_jac[1] * dq[0] + sat_jac[3] * dq[1]);
}

// ---------------------------------------------------------------------------
// rollout / batch

Trajectory rollout(const WorldModel& m, std::span<const double> s0,
                   const std::vector<Vec>& actions) {
  if (s0.size() != m.state_dim()) throw std::invalid_argument("rollout: state dim mismatch");
  if (actions.empty()) throw std::invalid_argument("rollout: horizon must be >= 1");
  Trajectory traj;
  traj.states.reserve(actions.size() + 1);
  traj.states.emplace_back(s0.begin(), s0.end());
  traj.actions = actions;
  for (const Vec& a : actions) traj.states.push_back(m.forward(traj.states.back(), a));
  return traj;
}

std::vector<Vec> batch_forward(const WorldModel& m,
                               const std::vector<std::pair<Vec, Vec>>& pairs,
                               int workers) {
  for (const auto& [s, a] : pairs)
    if (s.size() != m.state_dim() || a.size() != m.action_dim())
      throw std::invalid_argument("batch_forward: dim mismatch");
  std::vector<Vec> out(pairs.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = m.forward(pairs[i].first, pairs[i].second);
  };
  const std::size_t n = pairs.size();
  if (workers <= 1 || n < 2) {
    work(0, n);
    return out;
  }
  const std::size_t nthreads = std::min<std::size_t>(workers, n);
  std::vector<std::thread> threads;
  threads.reserve(nthreads);
  const std::size_t chunk = (n + nthreads - 1) / nthreads;
  for (std::size_t t = 0; t < nthreads; ++t) {
    const std::size_t b = t * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    threads.emplace_back(work, b, e);
  }
  for (auto& th : threads) th.join();
  return out;
}

}  // namespace liftplan
