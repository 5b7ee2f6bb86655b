#include "liftplan/planners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace liftplan {
namespace {

class CountingModel final : public WorldModel {
 public:
  explicit CountingModel(const WorldModel& base) : base_(base) {}

  std::size_t state_dim() const override { return base_.state_dim(); }
  std::size_t action_dim() const override { return base_.action_dim(); }
  void forward_into(std::span<const double> s, std::span<const double> a,
                    std::span<double> out) const override {
    ++count_;
    base_.forward_into(s, a, out);
  }
  void vjp_state_into(std::span<const double> s, std::span<const double> a,
                      std::span<const double> cot, std::span<double> out) const override {
    ++count_;
    base_.vjp_state_into(s, a, cot, out);
  }
  void vjp_action_into(std::span<const double> s, std::span<const double> a,
                       std::span<const double> cot, std::span<double> out) const override {
    ++count_;
    base_.vjp_action_into(s, a, cot, out);
  }
  std::uint64_t count() const { return count_; }

 private:
  const WorldModel& base_;
  mutable std::uint64_t count_ = 0;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::vector<Vec> zero_actions(const PlanProblem& prob) {
  return std::vector<Vec>(prob.horizon, Vec(prob.model->action_dim(), 0.0));
}

bool finite_iterate(double value, const std::vector<Vec>& vs) {
  if (!std::isfinite(value) || value > kDivergenceLimit) return false;
  for (const auto& v : vs) {
    if (!all_finite(v)) return false;
    if (norm2(v) > kDivergenceLimit) return false;
  }
  return true;
}

// clean shooting loss; +inf on divergence
double safe_shooting(const PlanProblem& prob, const std::vector<Vec>& actions) {
  try {
    const double v = shooting_value_grad(prob, actions, nullptr);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  } catch (const DivergenceError&) {
    return std::numeric_limits<double>::infinity();
  }
}

// reverse sweep of ||s_T - g||^2 along an already computed trajectory
void reverse_sweep(const WorldModel& m, const std::vector<Vec>& states,
                   const std::vector<Vec>& actions, const Vec& goal,
                   std::vector<Vec>& d_actions) {
  const std::size_t T = actions.size();
  d_actions.assign(T, Vec());
  Vec lambda = scaled(2.0, sub(states[T], goal));
  for (std::size_t t = T; t-- > 0;) {
    d_actions[t] = m.vjp_action(states[t], actions[t], lambda);
    if (t > 0) lambda = m.vjp_state(states[t], actions[t], lambda);
  }
}

struct GdOutcome {
  std::vector<Vec> actions;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool diverged = false;
};

// Shared driver for plan_gd / plan_gd_noisy: evaluate the (optionally
// perturbed) loss, track the best unperturbed iterate, step.
GdOutcome noisy_gd_driver(const PlanProblem& prob, std::size_t steps, double eta,
                          double sigma_a, double sigma_s, RngStream& rng,
                          PlanTrace* trace) {
  const WorldModel& m = *prob.model;
  const std::size_t T = prob.horizon;

  GdOutcome out;
  std::vector<Vec> a = zero_actions(prob);
  out.actions = a;

  std::vector<Vec> d_actions;
  for (std::size_t k = 0; k < steps; ++k) {
    std::vector<Vec> a_eval = a;
    if (sigma_a > 0.0)
      for (auto& at : a_eval) axpy(1.0, gauss_vec(rng, at.size(), sigma_a), at);

    double value;
    Trajectory traj;
    try {
      traj = noisy_rollout(m, prob.s0, a_eval, sigma_s, rng);
      for (std::size_t t = 0; t <= T; ++t)
        if (!all_finite(traj.states[t]))
          throw DivergenceError("rollout diverged", t > 0 ? t - 1 : 0);
      value = sumsq(sub(traj.states[T], prob.goal));
    } catch (const DivergenceError&) {
      out.diverged = true;
      break;
    }
    if (!finite_iterate(value, a_eval)) {
      out.diverged = true;
      break;
    }
    if (value < out.best_loss) {
      out.best_loss = value;
      out.actions = a;
    }
    if (trace) {
      IterRecord rec;
      rec.iter = k;
      rec.objective = value;
      rec.actions = a;
      trace->iters.push_back(std::move(rec));
    }
    if (value == 0.0) break;

    reverse_sweep(m, traj.states, a_eval, prob.goal, d_actions);
    for (std::size_t t = 0; t < T; ++t) axpy(-eta, d_actions[t], a[t]);
    out.iterations = k + 1;
  }

  // the post-final-update iterate was never scored; give it a chance
  if (!out.diverged) {
    const double v = safe_shooting(prob, a);
    if (v < out.best_loss) {
      out.best_loss = v;
      out.actions = a;
    }
  }
  return out;
}

PlanResult finish_result(const PlanProblem& prob, std::vector<Vec> actions,
                         double final_objective, std::size_t iterations, bool diverged,
                         const CountingModel& counter, const Stopwatch& watch,
                         std::optional<PlanTrace> trace) {
  PlanResult res;
  res.actions = std::move(actions);
  res.final_objective = final_objective;
  res.iterations_used = iterations;
  res.diverged = diverged;
  res.final_loss = safe_shooting(prob, res.actions);
  res.model_evals = counter.count();
  res.wall_clock = watch.seconds();
  res.trace = std::move(trace);
  return res;
}

}  // namespace

void GraspConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("grasp config: steps must be >= 1");
  if (eta_a <= 0.0 || eta_s <= 0.0 || eta_sync <= 0.0)
    throw std::invalid_argument("grasp config: learning rates must be > 0");
  if (sigma_state < 0.0) throw std::invalid_argument("grasp config: sigma_state must be >= 0");
  if (gamma <= 0.0) throw std::invalid_argument("grasp config: gamma must be > 0");
  if (k_sync < 1) throw std::invalid_argument("grasp config: k_sync must be >= 1");
  if (noise_decay <= 0.0 || noise_decay > 1.0)
    throw std::invalid_argument("grasp config: noise_decay must be in (0, 1]");
}

void CemConfig::validate() const {
  if (population < 1 || elites < 1 || elites > population)
    throw std::invalid_argument("cem config: need 1 <= elites <= population");
  if (iterations < 1) throw std::invalid_argument("cem config: iterations must be >= 1");
  if (init_std <= 0.0 || min_std < 0.0)
    throw std::invalid_argument("cem config: bad std bounds");
}

Trajectory init_states_interp(const PlanProblem& prob, double eps, RngStream& rng) {
  prob.validate();
  if (eps < 0.0) eps = 0.1 * norm2(sub(prob.goal, prob.s0));
  const std::size_t T = prob.horizon;
  const std::size_t n = prob.model->state_dim();

  Trajectory traj;
  traj.states.resize(T + 1);
  traj.actions.assign(T, Vec(prob.model->action_dim(), 0.0));
  traj.states[0] = prob.s0;
  traj.states[T] = prob.goal;
  for (std::size_t t = 1; t < T; ++t) {
    const double w = static_cast<double>(t) / static_cast<double>(T);
    Vec s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = w * prob.goal[i] + (1.0 - w) * prob.s0[i];
    if (eps > 0.0) axpy(1.0, gauss_vec(rng, n, eps), s);
    traj.states[t] = std::move(s);
  }
  return traj;
}

Trajectory noisy_rollout(const WorldModel& m, std::span<const double> s0,
                         const std::vector<Vec>& actions, double sigma_s,
                         RngStream& rng) {
  if (sigma_s < 0.0) throw std::invalid_argument("noisy_rollout: sigma_s must be >= 0");
  if (sigma_s == 0.0) return rollout(m, s0, actions);
  Trajectory traj;
  traj.states.reserve(actions.size() + 1);
  traj.states.emplace_back(s0.begin(), s0.end());
  traj.actions = actions;
  for (const Vec& a : actions) {
    Vec next = m.forward(traj.states.back(), a);
    axpy(1.0, gauss_vec(rng, next.size(), sigma_s), next);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

PlanResult plan_gd(const PlanProblem& prob, std::size_t steps, double eta,
                   RngStream& rng, bool record_trace) {
  return plan_gd_noisy(prob, steps, eta, 0.0, 0.0, rng, record_trace);
}

PlanResult plan_gd_noisy(const PlanProblem& prob, std::size_t steps, double eta,
                         double sigma_a, double sigma_s, RngStream& rng,
                         bool record_trace) {
  prob.validate();
  if (steps < 1) throw std::invalid_argument("plan_gd: steps must be >= 1");
  if (sigma_a < 0.0 || sigma_s < 0.0)
    throw std::invalid_argument("plan_gd_noisy: sigmas must be >= 0");

  Stopwatch watch;
  CountingModel counter(*prob.model);
  PlanProblem counted = prob;
  counted.model = &counter;

  std::optional<PlanTrace> trace;
  if (record_trace) trace.emplace();
  GdOutcome out = noisy_gd_driver(counted, steps, eta, sigma_a, sigma_s, rng,
                                  trace ? &*trace : nullptr);
  return finish_result(counted, std::move(out.actions), out.best_loss, out.iterations,
                       out.diverged, counter, watch, std::move(trace));
}

PlanResult plan_lifted(const PlanProblem& prob, std::size_t steps, double eta_a,
                       double eta_s, double sigma_state, RngStream& rng,
                       const Trajectory* init, double init_eps, bool record_trace) {
  prob.validate();
  if (steps < 1) throw std::invalid_argument("plan_lifted: steps must be >= 1");
  if (eta_a <= 0.0 || eta_s <= 0.0)
    throw std::invalid_argument("plan_lifted: learning rates must be > 0");
  if (sigma_state < 0.0) throw std::invalid_argument("plan_lifted: sigma must be >= 0");

  Stopwatch watch;
  CountingModel counter(*prob.model);
  PlanProblem counted = prob;
  counted.model = &counter;
  const std::size_t T = prob.horizon;

  Trajectory traj = init ? *init : init_states_interp(counted, init_eps, rng);
  std::optional<PlanTrace> trace;
  if (record_trace) trace.emplace();

  Trajectory last_good = traj;
  bool diverged = false;
  std::size_t iterations = 0;
  double objective = 0.0;
  LossGrads grads;
  for (std::size_t k = 0; k < steps; ++k) {
    double value;
    try {
      value = lifted_value_grad(counted, traj, &grads);
    } catch (const DivergenceError&) {
      diverged = true;
      break;
    }
    bool ok = finite_iterate(value, traj.actions);
    for (const auto& s : traj.states)
      ok = ok && all_finite(s) && norm2(s) <= kDivergenceLimit;
    if (!ok) {
      diverged = true;
      break;
    }
    last_good = traj;
    objective = value;

    for (std::size_t t = 1; t < T; ++t) axpy(-eta_s, grads.d_states[t - 1], traj.states[t]);
    if (sigma_state > 0.0)
      for (std::size_t t = 1; t < T; ++t)
        axpy(1.0, gauss_vec(rng, traj.states[t].size(), sigma_state), traj.states[t]);
    for (std::size_t t = 0; t < T; ++t) axpy(-eta_a, grads.d_actions[t], traj.actions[t]);
    iterations = k + 1;

    if (trace) {
      IterRecord rec;
      rec.iter = k;
      rec.objective = value;
      rec.states = traj.states;
      rec.actions = traj.actions;
      trace->iters.push_back(std::move(rec));
    }
  }

  if (diverged) traj = last_good;
  // final objective: lifted loss at the returned iterate
  try {
    objective = lifted_value_grad(counted, traj, nullptr);
  } catch (const DivergenceError&) {
    objective = std::numeric_limits<double>::infinity();
  }
  return finish_result(counted, std::move(traj.actions), objective, iterations, diverged,
                       counter, watch, std::move(trace));
}

PlanResult plan_grasp(const PlanProblem& prob, const GraspConfig& cfg, RngStream& rng) {
  prob.validate();
  cfg.validate();

  Stopwatch watch;
  CountingModel counter(*prob.model);
  PlanProblem counted = prob;
  counted.model = &counter;
  const std::size_t T = prob.horizon;

  Trajectory traj = init_states_interp(counted, cfg.init_eps, rng);
  std::optional<PlanTrace> trace;
  if (cfg.record_trace) trace.emplace();

  std::vector<Vec> best_actions = traj.actions;
  double best_shooting = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<Vec>& a, double shooting_loss) {
    if (shooting_loss < best_shooting) {
      best_shooting = shooting_loss;
      best_actions = a;
    }
  };

  Trajectory last_good = traj;
  bool diverged = false;
  std::size_t iterations = 0;
  double sigma = cfg.sigma_state;
  LossGrads grads;
  std::vector<Vec> d_sync;
  for (std::size_t k = 0; k < cfg.steps; ++k) {
    double value;
    try {
      value = grasp_value_grad(counted, traj, cfg.gamma, &grads);
    } catch (const DivergenceError&) {
      diverged = true;
      break;
    }
    bool ok = finite_iterate(value, traj.actions);
    for (const auto& s : traj.states)
      ok = ok && all_finite(s) && norm2(s) <= kDivergenceLimit;
    if (!ok) {
      diverged = true;
      break;
    }
    last_good = traj;

    // joint step from one gradient evaluation, then state noise
    for (std::size_t t = 1; t < T; ++t) axpy(-cfg.eta_s, grads.d_states[t - 1], traj.states[t]);
    for (std::size_t t = 0; t < T; ++t) axpy(-cfg.eta_a, grads.d_actions[t], traj.actions[t]);
    if (sigma > 0.0)
      for (std::size_t t = 1; t < T; ++t)
        axpy(1.0, gauss_vec(rng, traj.states[t].size(), sigma), traj.states[t]);
    sigma *= cfg.noise_decay;
    iterations = k + 1;

    if (trace) {
      IterRecord rec;
      rec.iter = k;
      rec.objective = value;
      rec.states = traj.states;
      rec.actions = traj.actions;
      trace->iters.push_back(std::move(rec));
    }

    // periodic sync: overwrite lifted states with the rollout, refine actions
    // on the shooting loss, then re-seed states from the refined rollout
    if (cfg.k_sync <= cfg.steps && (k + 1) % cfg.k_sync == 0) {
      try {
        Trajectory roll = rollout(counter, prob.s0, traj.actions);
        for (std::size_t t = 0; t <= T; ++t)
          if (!all_finite(roll.states[t])) throw DivergenceError("sync rollout diverged", t);
        consider(traj.actions, sumsq(sub(roll.states[T], prob.goal)));
        for (std::size_t t = 1; t < T; ++t) traj.states[t] = roll.states[t];

        for (std::size_t j = 0; j < cfg.j_sync; ++j) {
          reverse_sweep(counter, roll.states, traj.actions, prob.goal, d_sync);
          for (std::size_t t = 0; t < T; ++t) axpy(-cfg.eta_sync, d_sync[t], traj.actions[t]);
          roll = rollout(counter, prob.s0, traj.actions);
          bool sync_ok = true;
          for (std::size_t t = 0; t <= T; ++t) sync_ok = sync_ok && all_finite(roll.states[t]);
          if (!sync_ok) throw DivergenceError("sync step diverged", j);
          consider(traj.actions, sumsq(sub(roll.states[T], prob.goal)));
        }
        if (cfg.j_sync > 0)
          for (std::size_t t = 1; t < T; ++t) traj.states[t] = roll.states[t];
        last_good = traj;
      } catch (const DivergenceError&) {
        diverged = true;
        traj = last_good;
        break;
      }
    }
  }

  if (diverged) traj = last_good;
  // final re-score of the current actions against the recorded best
  consider(traj.actions, safe_shooting(counted, traj.actions));

  return finish_result(counted, std::move(best_actions), best_shooting, iterations,
                       diverged, counter, watch, std::move(trace));
}

std::pair<Vec, Vec> cem_refit(const std::vector<Vec>& candidates,
                              const std::vector<std::size_t>& elite_indices) {
  if (candidates.empty() || elite_indices.empty())
    throw std::invalid_argument("cem_refit: empty input");
  const std::size_t dim = candidates.front().size();
  Vec mean(dim, 0.0), std_dev(dim, 0.0);
  for (std::size_t idx : elite_indices) axpy(1.0, candidates[idx], mean);
  scale_inplace(1.0 / static_cast<double>(elite_indices.size()), mean);
  for (std::size_t idx : elite_indices)
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = candidates[idx][i] - mean[i];
      std_dev[i] += d * d;
    }
  for (double& v : std_dev) v = std::sqrt(v / static_cast<double>(elite_indices.size()));
  return {std::move(mean), std::move(std_dev)};
}

PlanResult plan_cem(const PlanProblem& prob, const CemConfig& cfg, RngStream& rng) {
  prob.validate();
  cfg.validate();

  Stopwatch watch;
  CountingModel counter(*prob.model);
  PlanProblem counted = prob;
  counted.model = &counter;
  const std::size_t T = prob.horizon;
  const std::size_t k_act = prob.model->action_dim();
  const std::size_t dim = T * k_act;

  auto unflatten = [&](const Vec& flat) {
    std::vector<Vec> actions(T, Vec(k_act));
    for (std::size_t t = 0; t < T; ++t)
      std::copy(flat.begin() + t * k_act, flat.begin() + (t + 1) * k_act,
                actions[t].begin());
    return actions;
  };

  Vec mean(dim, 0.0), std_dev(dim, cfg.init_std);
  std::optional<PlanTrace> trace;
  if (cfg.record_trace) trace.emplace();

  std::vector<Vec> candidates(cfg.population, Vec(dim));
  Vec losses(cfg.population);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    for (std::size_t i = 0; i < cfg.population; ++i) {
      Vec& c = candidates[i];
      for (std::size_t d = 0; d < dim; ++d) c[d] = mean[d] + std_dev[d] * rng.next_gauss();
      losses[i] = safe_shooting(counted, unflatten(c));
    }
    // stable elite selection: loss, then candidate index
    std::vector<std::size_t> order(cfg.population);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return losses[a] < losses[b]; });
    order.resize(cfg.elites);
    auto [new_mean, new_std] = cem_refit(candidates, order);
    mean = std::move(new_mean);
    std_dev = std::move(new_std);
    for (double& v : std_dev) v = std::max(v, cfg.min_std);

    if (trace) {
      IterRecord rec;
      rec.iter = it;
      rec.objective = losses[order.front()];
      trace->iters.push_back(std::move(rec));
    }
  }

  std::vector<Vec> actions = unflatten(mean);
  const double final = safe_shooting(counted, actions);
  return finish_result(counted, std::move(actions), final, cfg.iterations,
                       !std::isfinite(final), counter, watch, std::move(trace));
}

}  // namespace liftplan
