#include <cmath>

#include "liftplan/planners.hpp"
#include "liftplan/theory.hpp"

namespace liftplan::theory {
namespace {

double frob_norm(const DenseMatrix& m) { return norm2(m.data); }

}  // namespace

CheckResult gaussian_smoothing_check(const SmoothTestFn& fn, double sigma,
                                     std::size_t samples, RngStream& rng) {
  if (sigma <= 0.0) throw std::invalid_argument("gaussian_smoothing_check: sigma must be > 0");
  if (fn.probes.empty()) throw std::invalid_argument("gaussian_smoothing_check: no probes");

  const double bound = std::min(fn.lipschitz, gauss_norm_mean(fn.dim) / sigma * fn.sup_norm);

  CheckResult res;
  res.name = "gaussian_smoothing";
  res.bound = bound;
  res.pass = true;
  res.margin = std::numeric_limits<double>::infinity();
  Vec point(fn.dim);
  for (const Vec& probe : fn.probes) {
    Vec sum(fn.dim, 0.0), sum_sq(fn.dim, 0.0);
    for (std::size_t s = 0; s < samples; ++s) {
      for (std::size_t i = 0; i < fn.dim; ++i) point[i] = probe[i] + sigma * rng.next_gauss();
      const Vec g = fn.grad(point);
      for (std::size_t i = 0; i < fn.dim; ++i) {
        sum[i] += g[i];
        sum_sq[i] += g[i] * g[i];
      }
    }
    const double inv = 1.0 / static_cast<double>(samples);
    double var_total = 0.0;
    Vec mean(fn.dim);
    for (std::size_t i = 0; i < fn.dim; ++i) {
      mean[i] = sum[i] * inv;
      var_total += std::max(0.0, sum_sq[i] * inv - mean[i] * mean[i]);
    }
    const double se = std::sqrt(var_total * inv);
    const double observed = norm2(mean);
    const double margin = bound + 3.0 * se - observed;
    if (margin < res.margin) {
      res.margin = margin;
      res.observed = observed;
    }
    if (margin < 0.0) res.pass = false;
  }
  return res;
}

OuTubeReport ou_tube_check(double eta_s, double sigma, std::size_t steps,
                           std::size_t burn_in, RngStream& rng, std::size_t dim,
                           double mu) {
  if (!(eta_s > 0.0 && eta_s < 1.0))
    throw std::invalid_argument("ou_tube_check: eta_s must be in (0, 1)");
  if (steps <= burn_in) throw std::invalid_argument("ou_tube_check: steps must exceed burn_in");

  OuTubeReport rep;
  rep.predicted_var = sigma * sigma / (4.0 * eta_s * (1.0 - eta_s));

  const double keep = 1.0 - 2.0 * eta_s;
  Vec s(dim, 0.0);
  Vec sum(dim, 0.0), sum_sq(dim, 0.0);
  std::size_t count = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < dim; ++i)
      s[i] = keep * s[i] + 2.0 * eta_s * mu + (sigma > 0.0 ? sigma * rng.next_gauss() : 0.0);
    if (k < 24) {
      double err = 0.0;
      for (double v : s) err += (v - mu) * (v - mu);
      rep.mean_error_path.push_back(std::sqrt(err));
    }
    if (k >= burn_in) {
      for (std::size_t i = 0; i < dim; ++i) {
        sum[i] += s[i];
        sum_sq[i] += s[i] * s[i];
      }
      ++count;
    }
  }
  const double inv = 1.0 / static_cast<double>(count);
  double var = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double mean = sum[i] * inv;
    var += sum_sq[i] * inv - mean * mean;
  }
  rep.empirical_var = var / static_cast<double>(dim);
  rep.rel_err = rep.predicted_var > 0.0
                    ? std::abs(rep.empirical_var - rep.predicted_var) / rep.predicted_var
                    : std::abs(rep.empirical_var);

  rep.check.name = "ou_tube";
  rep.check.observed = rep.empirical_var;
  rep.check.bound = rep.predicted_var;
  rep.check.margin = 0.05 - rep.rel_err;
  rep.check.pass = rep.rel_err <= 0.05;
  return rep;
}

TubeDriftReport tube_drift_check(const LinearModel& model, double gamma, double eta_a,
                                 std::size_t steps, std::size_t replicas,
                                 double tube_sigma, const Vec& s_bar, const Vec& a0,
                                 const Vec& goal, RngStream& rng) {
  const std::size_t n = model.state_dim();
  if (s_bar.size() != n || goal.size() != n || a0.size() != model.action_dim())
    throw std::invalid_argument("tube_drift_check: dim mismatch");
  const double alpha = 2.0 * eta_a;

  // P = B B^T; contraction precondition alpha * gamma * lambda_max(P) < 1
  const DenseMatrix p = matmul(model.B(), transpose(model.B()));
  const double lam = max_eig_sym(p, 1e-10);
  if (!(alpha * gamma * lam < 1.0))
    throw std::invalid_argument("tube_drift_check: alpha*gamma*lambda_max(BB^T) must be < 1");

  // predicted mean recursion
  TubeDriftReport rep;
  Vec mu = model.forward(s_bar, a0);
  rep.predicted_mean.push_back(mu);
  for (std::size_t k = 0; k < steps; ++k) {
    Vec next = mu;
    Vec pm = matvec(p, mu);
    Vec pg = matvec(p, goal);
    axpy(-alpha * gamma, pm, next);
    axpy(alpha * gamma, pg, next);
    mu = std::move(next);
    rep.predicted_mean.push_back(mu);
  }

  // simulated replicas of the stop-gradient action update with zero-mean
  // tube residuals s' = mu + eps
  std::vector<Vec> sum(steps + 1, Vec(n, 0.0));
  std::vector<Vec> sum_sq(steps + 1, Vec(n, 0.0));
  for (std::size_t r = 0; r < replicas; ++r) {
    RngStream stream = rng.derive(r);
    Vec a = a0;
    for (std::size_t k = 0; k <= steps; ++k) {
      const Vec mu_k = model.forward(s_bar, a);
      for (std::size_t i = 0; i < n; ++i) {
        sum[k][i] += mu_k[i];
        sum_sq[k][i] += mu_k[i] * mu_k[i];
      }
      if (k == steps) break;
      const Vec eps = gauss_vec(stream, n, tube_sigma);
      // grad_a = 2 B^T (mu - s') + 2 gamma B^T (mu - g) with s' = mu + eps
      Vec cot = scaled(-2.0, eps);
      axpy(2.0 * gamma, sub(mu_k, goal), cot);
      const Vec grad = matvec_t(model.B(), cot);
      axpy(-eta_a, grad, a);
    }
  }

  rep.check.name = "tube_drift";
  rep.max_sigma_dev = 0.0;
  const double inv = 1.0 / static_cast<double>(replicas);
  for (std::size_t k = 0; k <= steps; ++k) {
    Vec mean(n);
    double var_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mean[i] = sum[k][i] * inv;
      var_total += std::max(0.0, sum_sq[k][i] * inv - mean[i] * mean[i]);
    }
    rep.empirical_mean.push_back(mean);
    const double dev = norm2(sub(mean, rep.predicted_mean[k]));
    const double se3 = 3.0 * std::sqrt(var_total * inv) + 1e-12;
    rep.max_sigma_dev = std::max(rep.max_sigma_dev, dev / se3);
  }
  rep.check.observed = rep.max_sigma_dev;
  rep.check.bound = 1.0;
  rep.check.margin = 1.0 - rep.max_sigma_dev;
  rep.check.pass = rep.max_sigma_dev <= 1.0;
  return rep;
}

RolloutCovReport rollout_covariance_check(const LinearModel& model, double sigma_env,
                                          std::size_t T, std::size_t samples,
                                          RngStream& rng) {
  if (samples < 1000)
    throw std::invalid_argument("rollout_covariance_check: samples must be >= 1000");
  const std::size_t n = model.state_dim();
  const Vec s0(n, 0.0);
  const std::vector<Vec> actions(T, Vec(model.action_dim(), 0.0));

  RolloutCovReport rep;
  // exact recursion Sigma_{t+1} = A Sigma_t A^T + sigma^2 I
  DenseMatrix cov(n, n);
  rep.predicted.push_back(cov);
  for (std::size_t t = 0; t < T; ++t) {
    cov = matmul(matmul(model.A(), cov), transpose(model.A()));
    for (std::size_t i = 0; i < n; ++i) cov(i, i) += sigma_env * sigma_env;
    rep.predicted.push_back(cov);
  }

  std::vector<Vec> sum(T + 1, Vec(n, 0.0));
  std::vector<DenseMatrix> outer(T + 1, DenseMatrix(n, n));
  for (std::size_t s = 0; s < samples; ++s) {
    RngStream stream = rng.derive(s);
    const Trajectory traj = noisy_rollout(model, s0, actions, sigma_env, stream);
    for (std::size_t t = 0; t <= T; ++t) {
      const Vec& st = traj.states[t];
      for (std::size_t i = 0; i < n; ++i) {
        sum[t][i] += st[i];
        for (std::size_t j = 0; j < n; ++j) outer[t](i, j) += st[i] * st[j];
      }
    }
  }

  rep.max_rel_dev = 0.0;
  const double inv = 1.0 / static_cast<double>(samples);
  for (std::size_t t = 0; t <= T; ++t) {
    DenseMatrix emp(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        emp(i, j) = outer[t](i, j) * inv - (sum[t][i] * inv) * (sum[t][j] * inv);
    rep.empirical.push_back(emp);
    if (t == 0) continue;
    DenseMatrix diff = emp;
    for (std::size_t i = 0; i < diff.data.size(); ++i) diff.data[i] -= rep.predicted[t].data[i];
    const double denom = std::max(frob_norm(rep.predicted[t]), 1e-300);
    if (sigma_env == 0.0)
      rep.max_rel_dev = std::max(rep.max_rel_dev, frob_norm(emp));
    else
      rep.max_rel_dev = std::max(rep.max_rel_dev, frob_norm(diff) / denom);
  }

  rep.check.name = "rollout_covariance";
  rep.check.observed = rep.max_rel_dev;
  rep.check.bound = 0.05;
  rep.check.margin = 0.05 - rep.max_rel_dev;
  rep.check.pass = rep.max_rel_dev <= 0.05;
  return rep;
}

BoltzmannReport boltzmann_double_well_check(double eta, double sigma, std::size_t steps,
                                            std::size_t burn_in, RngStream& rng) {
  // tilted double well; the tilt makes the two basin weights distinct
  auto well = [](double x) {
    const double q = x * x - 1.0;
    return q * q + 0.3 * x;
  };
  auto well_grad = [](double x) { return 4.0 * x * (x * x - 1.0) + 0.3; };

  double x = -1.0;
  double sum_l = 0.0;
  std::size_t left = 0, right = 0, count = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    x += -eta * well_grad(x) + sigma * rng.next_gauss();
    if (k >= burn_in) {
      sum_l += well(x);
      (x < 0.0 ? left : right)++;
      ++count;
    }
  }
  const double emp_mean_l = sum_l / static_cast<double>(count);

  // quadrature over [-3, 3]
  auto gibbs_stats = [&](double beta, double* mean_l, double* ratio) {
    const std::size_t nq = 6001;
    const double lo = -3.0, hi = 3.0;
    const double h = (hi - lo) / static_cast<double>(nq - 1);
    double z = 0.0, zl = 0.0, zneg = 0.0, zpos = 0.0;
    for (std::size_t i = 0; i < nq; ++i) {
      const double xi = lo + h * static_cast<double>(i);
      const double wgt = (i == 0 || i == nq - 1) ? 0.5 : 1.0;
      const double e = std::exp(-beta * well(xi)) * wgt;
      z += e;
      zl += e * well(xi);
      (xi < 0.0 ? zneg : zpos) += e;
    }
    *mean_l = zl / z;
    *ratio = zpos / zneg;
  };

  // fit beta by matching E[L]; E_beta[L] is decreasing in beta
  double lo_b = 1e-3, hi_b = 1e3;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo_b + hi_b);
    double mean_l, ratio;
    gibbs_stats(mid, &mean_l, &ratio);
    (mean_l > emp_mean_l ? lo_b : hi_b) = mid;
  }
  const double beta = 0.5 * (lo_b + hi_b);

  BoltzmannReport rep;
  rep.beta_fit = beta;
  double mean_l;
  gibbs_stats(beta, &mean_l, &rep.predicted_ratio);
  rep.observed_ratio = static_cast<double>(right) / std::max<double>(1.0, static_cast<double>(left));
  rep.rel_err = std::abs(rep.observed_ratio - rep.predicted_ratio) /
                std::max(rep.predicted_ratio, 1e-300);
  rep.check.name = "boltzmann_double_well";
  rep.check.observed = rep.observed_ratio;
  rep.check.bound = rep.predicted_ratio;
  rep.check.margin = 0.20 - rep.rel_err;
  rep.check.pass = rep.rel_err <= 0.20;
  return rep;
}

std::vector<CheckResult> run_standard_checks(std::uint64_t seed) {
  std::vector<CheckResult> results;
  RngStream root(seed, 0x7e0);

  {  // lifted smoothness bound over random systems
    RngStream rng = root.derive(1);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 1 + rng.next_u64() % 4;
      const std::size_t m = 1 + rng.next_u64() % 4;
      DenseMatrix a(n, n), b(n, m);
      for (double& e : a.data) e = rng.uniform(-1.5, 1.5);
      for (double& e : b.data) e = rng.uniform(-1.5, 1.5);
      for (std::size_t t : {std::size_t(2), std::size_t(10), std::size_t(40)}) {
        LinearPlanSystem sys{a, b, Vec(n, 0.0), Vec(n, 0.0), t};
        const SmoothnessReport rep = smoothness_report(sys);
        worst = std::max(worst, rep.lifted_lipschitz / rep.lifted_upper_bound);
      }
    }
    results.push_back({"lifted_smoothness_bound", worst <= 1.0, worst, 1.0, 1.0 - worst});
  }

  {  // shooting explosion with a certified |lambda| = 1.5 mode
    Vec diag_entries = {1.5, 0.7};
    LinearPlanSystem sys{DenseMatrix::diag(diag_entries), DenseMatrix::identity(2),
                         Vec(2, 0.0), Vec(2, 0.0), 5};
    ModeDirection mode{{1.0, 0.0}, {1.0, 0.0}, 1.5};
    double min_ratio = std::numeric_limits<double>::infinity();
    Vec log_l, ts;
    for (std::size_t t : {std::size_t(5), std::size_t(10), std::size_t(20)}) {
      sys.horizon = t;
      const SmoothnessReport rep = smoothness_report(sys, &mode);
      min_ratio = std::min(min_ratio, rep.shooting_lipschitz / rep.shooting_lower_bound);
      log_l.push_back(std::log(rep.shooting_lipschitz));
      ts.push_back(static_cast<double>(t));
    }
    results.push_back({"shooting_explosion_lower_bound", min_ratio >= 1.0, min_ratio, 1.0,
                       min_ratio - 1.0});
    // least-squares slope of log lambda_max against T
    const double tbar = pairwise_sum(ts) / 3.0, lbar = pairwise_sum(log_l) / 3.0;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      num += (ts[i] - tbar) * (log_l[i] - lbar);
      den += (ts[i] - tbar) * (ts[i] - tbar);
    }
    const double slope = num / den;
    const double target = 2.0 * std::log(1.5);
    const double rel = std::abs(slope - target) / target;
    results.push_back({"shooting_explosion_slope", rel <= 0.10, slope, target, 0.10 - rel});
  }

  {  // gaussian smoothing on the 1-D clamp
    RngStream rng = root.derive(2);
    SmoothTestFn clamp;
    clamp.dim = 1;
    clamp.value = [](std::span<const double> x) { return std::clamp(x[0], -1.0, 1.0); };
    clamp.grad = [](std::span<const double> x) {
      return Vec{(x[0] > -1.0 && x[0] < 1.0) ? 1.0 : 0.0};
    };
    clamp.sup_norm = 1.0;
    clamp.lipschitz = 1.0;
    clamp.probes = {{0.0}, {0.5}, {-0.5}, {0.9}, {1.5}};
    results.push_back(gaussian_smoothing_check(clamp, 0.1, 20000, rng));
  }

  {  // OU tube over the (eta_s, sigma) grid
    RngStream rng = root.derive(3);
    double worst = 0.0;
    for (double eta : {0.1, 0.25, 0.5})
      for (double sig : {0.05, 0.2}) {
        RngStream sub = rng.derive(static_cast<std::uint64_t>(eta * 1000 + sig * 10));
        const OuTubeReport rep = ou_tube_check(eta, sig, 1100000, 100000, sub);
        worst = std::max(worst, rep.rel_err);
      }
    results.push_back({"ou_tube", worst <= 0.05, worst, 0.05, 0.05 - worst});
  }

  {  // tube-center drift on B = I
    RngStream rng = root.derive(4);
    LinearModel model(DenseMatrix::identity(2), DenseMatrix::identity(2));
    const TubeDriftReport rep =
        tube_drift_check(model, 1.0, 0.05, 40, 4000, 0.1, Vec(2, 0.0), Vec(2, 0.0),
                         Vec{1.0, -0.5}, rng);
    results.push_back(rep.check);
  }

  {  // rollout covariance: random walk and unstable growth
    RngStream rng = root.derive(5);
    LinearModel walk(DenseMatrix::identity(2), DenseMatrix::identity(2));
    auto rep = rollout_covariance_check(walk, 0.1, 10, 20000, rng);
    results.push_back({"rollout_covariance_walk", rep.check.pass, rep.max_rel_dev, 0.05,
                       0.05 - rep.max_rel_dev});
    DenseMatrix a = DenseMatrix::identity(2);
    scale_inplace(1.2, a.data);
    LinearModel unstable(std::move(a), DenseMatrix::identity(2));
    RngStream rng2 = root.derive(6);
    rep = rollout_covariance_check(unstable, 0.1, 10, 20000, rng2);
    results.push_back({"rollout_covariance_unstable", rep.check.pass, rep.max_rel_dev, 0.05,
                       0.05 - rep.max_rel_dev});
  }

  {  // Boltzmann weights in the tilted double well
    RngStream rng = root.derive(7);
    const BoltzmannReport rep = boltzmann_double_well_check(0.01, 0.1155, 2000000, 100000, rng);
    results.push_back(rep.check);
  }

  return results;
}

}  // namespace liftplan::theory
