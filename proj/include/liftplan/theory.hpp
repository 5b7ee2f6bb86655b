#pragma once

#include <functional>
#include <optional>
#include <string>

#include "liftplan/spectral.hpp"
#include "liftplan/worldmodel.hpp"

// Constructors and checks for the conditioning and stochastic-process results
// behind the planner design: shooting Hessians explode exponentially in the
// horizon while lifted Hessians stay bounded; the stop-gradient update
// contracts linearly to a unique fixed point; noised lifted states form a
// stationary Gaussian tube around their one-step predictions whose center
// drifts toward the goal; noisy rollouts, by contrast, spread without bound.
//
// A note on what is deliberately absent: no trajectory loss can make its
// minimizers exactly the dynamically feasible trajectories while staying
// insensitive to the model's state Jacobian (for any value-preserving model
// surgery that changes the Jacobian, the minimizer set would have to change
// without the loss noticing). The stop-gradient loss therefore trades exact
// feasibility enforcement for Jacobian independence; its fixed points are
// characterized by the contraction/tube/drift checks below rather than by a
// feasibility theorem, and the periodic full-rollout sync recovers true
// feasibility where it matters.

namespace liftplan::theory {

struct LinearPlanSystem {
  DenseMatrix A;
  DenseMatrix B;
  Vec s0;
  Vec g;
  std::size_t horizon = 0;
};

// [A^{T-1}B, A^{T-2}B, ..., B], n x (mT)
DenseMatrix controllability(const LinearPlanSystem& sys);

// Lifted objective ||M z - b||^2 over z = (s_1..s_{T-1}, a_0..a_{T-1}).
// Requires T >= 2 (T = 1 has no free states and is a shooting problem).
struct LiftedSystem {
  DenseMatrix M;  // (nT) x (n(T-1) + mT)
  Vec b;
};
LiftedSystem lifted_matrix(const LinearPlanSystem& sys);

// Permutation from the (states; actions) stacking of z to the time-
// interleaved stacking (s_1, a_0, s_2, a_1, ..., a_{T-1}):
// interleaved[i] = z[perm[i]].
std::vector<std::size_t> interleaved_order(std::size_t n, std::size_t m, std::size_t T);

// Certified unstable mode: v a unit left eigenvector of A with eigenvalue
// lambda, w a unit action direction with |<v, Bw>| > 0.
struct ModeDirection {
  Vec v;
  Vec w;
  double lambda = 0.0;
};

struct SmoothnessReport {
  double shooting_lipschitz = 0.0;     // lambda_max(2 C^T C)
  double lifted_lipschitz = 0.0;       // lambda_max(2 M^T M)
  double shooting_lower_bound = 0.0;   // 2 mu^2 |lambda|^{2(T-1)}, 0 without a mode
  double lifted_upper_bound = 0.0;     // 6 (1 + ||A||^2 + ||B||^2)
};

SmoothnessReport smoothness_report(const LinearPlanSystem& sys,
                                   const ModeDirection* mode = nullptr);

// 2 [[I, -B], [-B^T, (1+beta) B^T B]]; the diagonal block of the
// stop-gradient update map for the pair (s_{t+1}, a_t).
DenseMatrix stopgrad_block_hessian(const DenseMatrix& B, double beta);

struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - observed, in the check's own units
};

// E||Z|| for Z ~ N(0, I_d): sqrt(2) Gamma((d+1)/2) / Gamma(d/2)
double gauss_norm_mean(std::size_t d);

// Monte-Carlo estimate of the smoothed gradient at each probe; asserts
// ||E grad|| <= min(Lip, c_d/sigma * sup) + 3 standard errors.
struct SmoothTestFn {
  std::size_t dim = 1;
  std::function<double(std::span<const double>)> value;
  std::function<Vec(std::span<const double>)> grad;
  double sup_norm = 0.0;
  double lipschitz = 0.0;
  std::vector<Vec> probes;
};
CheckResult gaussian_smoothing_check(const SmoothTestFn& fn, double sigma,
                                     std::size_t samples, RngStream& rng);

// Stationary statistics of s <- (1-2 eta_s) s + 2 eta_s mu + sigma xi.
struct OuTubeReport {
  double empirical_var = 0.0;
  double predicted_var = 0.0;  // sigma^2 / (4 eta_s (1 - eta_s))
  double rel_err = 0.0;
  Vec mean_error_path;  // ||mean_k - mu|| for the first few iterations
  CheckResult check;
};
OuTubeReport ou_tube_check(double eta_s, double sigma, std::size_t steps,
                           std::size_t burn_in, RngStream& rng,
                           std::size_t dim = 1, double mu = 0.0);

// Stop-gradient action updates against zero-mean tube residuals; the
// empirical mean of mu_t must follow (I - a g P) mu + a g P goal.
struct TubeDriftReport {
  std::vector<Vec> predicted_mean;
  std::vector<Vec> empirical_mean;
  double max_sigma_dev = 0.0;  // worst ||emp - pred|| in units of 3 SE
  CheckResult check;
};
TubeDriftReport tube_drift_check(const LinearModel& model, double gamma, double eta_a,
                                 std::size_t steps, std::size_t replicas,
                                 double tube_sigma, const Vec& s_bar, const Vec& a0,
                                 const Vec& goal, RngStream& rng);

// Per-step covariance of noisy rollouts vs. Sigma_{t+1} = A Sigma_t A^T + s^2 I.
struct RolloutCovReport {
  std::vector<DenseMatrix> predicted;
  std::vector<DenseMatrix> empirical;
  double max_rel_dev = 0.0;
  CheckResult check;
};
RolloutCovReport rollout_covariance_check(const LinearModel& model, double sigma_env,
                                          std::size_t T, std::size_t samples,
                                          RngStream& rng);

// Full Langevin on a 1-D tilted double well; fits the inverse temperature by
// matching E[L] against quadrature, then compares the two basin weights.
struct BoltzmannReport {
  double beta_fit = 0.0;
  double observed_ratio = 0.0;
  double predicted_ratio = 0.0;
  double rel_err = 0.0;
  CheckResult check;
};
BoltzmannReport boltzmann_double_well_check(double eta, double sigma, std::size_t steps,
                                            std::size_t burn_in, RngStream& rng);

// Fixed battery backing the `theory-check` CLI subcommand.
std::vector<CheckResult> run_standard_checks(std::uint64_t seed);

}  // namespace liftplan::theory
