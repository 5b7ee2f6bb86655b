#include "liftplan/objectives.hpp"

#include <cmath>

namespace liftplan {
namespace {

void check_boundary(const PlanProblem& prob, const Trajectory& traj) {
  const std::size_t T = prob.horizon;
  if (traj.horizon() != T || traj.states.size() != T + 1)
    throw std::invalid_argument("trajectory horizon does not match problem");
  if (traj.states[0] != prob.s0)
    throw std::invalid_argument("trajectory boundary violation: s_0 != problem s0");
  if (traj.states[T] != prob.goal)
    throw std::invalid_argument("trajectory boundary violation: s_T != goal");
}

}  // namespace

void PlanProblem::validate() const {
  if (!model) throw std::invalid_argument("plan problem: missing model");
  if (horizon < 1) throw std::invalid_argument("plan problem: horizon must be >= 1");
  if (s0.size() != model->state_dim() || goal.size() != model->state_dim())
    throw std::invalid_argument("plan problem: state dim mismatch");
}

double shooting_value_grad(const PlanProblem& prob, const std::vector<Vec>& actions,
                           std::vector<Vec>* d_actions) {
  prob.validate();
  const std::size_t T = prob.horizon;
  if (actions.size() != T) throw std::invalid_argument("shooting: action count mismatch");
  const WorldModel& m = *prob.model;

  std::vector<Vec> states;
  states.reserve(T + 1);
  states.push_back(prob.s0);
  for (std::size_t t = 0; t < T; ++t) {
    states.push_back(m.forward(states[t], actions[t]));
    if (!all_finite(states.back()))
      throw DivergenceError("shooting rollout diverged at step " + std::to_string(t), t);
  }

  const Vec residual = sub(states[T], prob.goal);
  const double value = sumsq(residual);
  if (d_actions) {
    d_actions->assign(T, Vec());
    Vec lambda = scaled(2.0, residual);
    for (std::size_t t = T; t-- > 0;) {
      (*d_actions)[t] = m.vjp_action(states[t], actions[t], lambda);
      if (t > 0) lambda = m.vjp_state(states[t], actions[t], lambda);
    }
  }
  return value;
}

double lifted_value_grad(const PlanProblem& prob, const Trajectory& traj,
                         LossGrads* grads) {
  prob.validate();
  check_boundary(prob, traj);
  const std::size_t T = prob.horizon;
  const WorldModel& m = *prob.model;

  std::vector<Vec> residuals(T);
  Vec terms(T);
  for (std::size_t t = 0; t < T; ++t) {
    residuals[t] = sub(m.forward(traj.states[t], traj.actions[t]), traj.states[t + 1]);
    terms[t] = sumsq(residuals[t]);
  }
  const double value = pairwise_sum(terms);

  if (grads) {
    grads->d_actions.assign(T, Vec());
    grads->d_states.assign(T >= 1 ? T - 1 : 0, Vec());
    for (std::size_t t = 0; t < T; ++t) {
      const Vec cot = scaled(2.0, residuals[t]);
      grads->d_actions[t] = m.vjp_action(traj.states[t], traj.actions[t], cot);
      if (t >= 1) {
        // d/d s_t: 2 (dF/ds_t)^T r_t - 2 r_{t-1}
        Vec g = m.vjp_state(traj.states[t], traj.actions[t], cot);
        axpy(-2.0, residuals[t - 1], g);
        grads->d_states[t - 1] = std::move(g);
      }
    }
  }
  return value;
}

double grasp_value_grad(const PlanProblem& prob, const Trajectory& traj, double gamma,
                        LossGrads* grads, std::span<const double> step_weights) {
  prob.validate();
  check_boundary(prob, traj);
  if (gamma <= 0.0) throw std::invalid_argument("grasp: gamma must be > 0");
  const std::size_t T = prob.horizon;
  if (!step_weights.empty() && step_weights.size() != T)
    throw std::invalid_argument("grasp: step_weights must have length T");
  for (double w : step_weights)
    if (w < 0.0) throw std::invalid_argument("grasp: step weights must be >= 0");
  const WorldModel& m = *prob.model;

  std::vector<Vec> dyn_res(T), goal_res(T);
  Vec terms(2 * T);
  for (std::size_t t = 0; t < T; ++t) {
    const Vec mu = m.forward(traj.states[t], traj.actions[t]);
    const double w = step_weights.empty() ? gamma : step_weights[t];
    dyn_res[t] = sub(mu, traj.states[t + 1]);
    goal_res[t] = sub(mu, prob.goal);
    terms[2 * t] = sumsq(dyn_res[t]);
    terms[2 * t + 1] = w * sumsq(goal_res[t]);
  }
  const double value = pairwise_sum(terms);

  if (grads) {
    grads->d_actions.assign(T, Vec());
    grads->d_states.assign(T >= 1 ? T - 1 : 0, Vec());
    for (std::size_t t = 0; t < T; ++t) {
      const double w = step_weights.empty() ? gamma : step_weights[t];
      // actions see the full chain through F; the state input is detached
      Vec cot = scaled(2.0, dyn_res[t]);
      axpy(2.0 * w, goal_res[t], cot);
      grads->d_actions[t] = m.vjp_action(traj.states[t], traj.actions[t], cot);
      // s_{t+1} appears only as the dynamics target: d = -2 (mu_t - s_{t+1})
      if (t + 1 <= T - 1) grads->d_states[t] = scaled(-2.0, dyn_res[t]);
    }
  }
  return value;
}

}  // namespace liftplan
