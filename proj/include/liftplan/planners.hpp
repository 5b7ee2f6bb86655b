#pragma once

#include <cstdint>
#include <optional>

#include "liftplan/objectives.hpp"

namespace liftplan {

// Any loss or iterate norm beyond this aborts the inner loop; unstable
// linear systems overflow quickly otherwise.
constexpr double kDivergenceLimit = 1e12;

struct IterRecord {
  std::size_t iter = 0;
  double objective = 0.0;  // the planner's own loss at the evaluated iterate
  double dyn_term = 0.0;
  double goal_term = 0.0;
  std::vector<Vec> states;   // post-update iterate (lifted planners only)
  std::vector<Vec> actions;  // post-update iterate
};

struct PlanTrace {
  std::vector<IterRecord> iters;
};

struct PlanResult {
  std::vector<Vec> actions;
  double final_loss = 0.0;       // shooting loss of `actions`, recomputed
  double final_objective = 0.0;  // planner's own objective at exit
  std::size_t iterations_used = 0;
  double wall_clock = 0.0;        // measured seconds (never serialized)
  std::uint64_t model_evals = 0;  // deterministic cost counter
  bool diverged = false;
  std::optional<PlanTrace> trace;
};

struct GraspConfig {
  std::size_t steps = 400;
  double eta_a = 0.2;
  double eta_s = 0.2;
  double sigma_state = 0.1;
  double gamma = 0.5;
  std::size_t k_sync = 100;  // sync every k_sync joint steps; > steps disables
  std::size_t j_sync = 25;   // shooting-GD steps per sync
  double eta_sync = 0.1;
  double noise_decay = 1.0;  // multiplicative per-step factor on sigma_state
  double init_eps = -1.0;    // < 0: defaults to 0.1 * ||g - s0||
  bool record_trace = false;

  void validate() const;
};

struct CemConfig {
  std::size_t population = 256;
  std::size_t elites = 32;
  std::size_t iterations = 60;
  double init_std = 1.0;
  double min_std = 1e-3;
  bool record_trace = false;

  void validate() const;
};

// Shooting gradient descent from zero actions; returns best-so-far actions
// by loss. Divergence flags the result and keeps the last finite iterate.
PlanResult plan_gd(const PlanProblem& prob, std::size_t steps, double eta,
                   RngStream& rng, bool record_trace = false);

// Joint gradient descent on the lifted dynamics loss with full state
// gradients and Gaussian noise on the free states. States start on the
// noised linear interpolation between s0 and g unless `init` is given.
PlanResult plan_lifted(const PlanProblem& prob, std::size_t steps, double eta_a,
                       double eta_s, double sigma_state, RngStream& rng,
                       const Trajectory* init = nullptr, double init_eps = -1.0,
                       bool record_trace = false);

// Stop-gradient lifted planner: joint step on the grasp loss, Gaussian noise
// on free states, periodic full-rollout sync with a few shooting-GD action
// steps. Returns the best actions by shooting loss across sync points plus a
// final re-score.
PlanResult plan_grasp(const PlanProblem& prob, const GraspConfig& cfg, RngStream& rng);

// Diagonal-Gaussian cross-entropy method over the flat action vector.
PlanResult plan_cem(const PlanProblem& prob, const CemConfig& cfg, RngStream& rng);

// Shooting GD evaluated at per-iteration perturbed actions (sigma_a) and/or
// with per-step rollout state noise (sigma_s); updates apply to the
// unperturbed actions. sigma_a = sigma_s = 0 reproduces plan_gd bitwise.
PlanResult plan_gd_noisy(const PlanProblem& prob, std::size_t steps, double eta,
                         double sigma_a, double sigma_s, RngStream& rng,
                         bool record_trace = false);

// s_t = (t/T) g + (1 - t/T) s0 + N(0, eps^2 I) on the free states; boundary
// states pinned to s0 and g; zero actions.
Trajectory init_states_interp(const PlanProblem& prob, double eps, RngStream& rng);

// s_{t+1} = F(s_t, a_t) + sigma_s * zeta_t; sigma_s = 0 draws nothing.
Trajectory noisy_rollout(const WorldModel& m, std::span<const double> s0,
                         const std::vector<Vec>& actions, double sigma_s,
                         RngStream& rng);

// Elite refit used by plan_cem: per-dimension mean and (biased) standard
// deviation of the selected candidates.
std::pair<Vec, Vec> cem_refit(const std::vector<Vec>& candidates,
                              const std::vector<std::size_t>& elite_indices);

}  // namespace liftplan
