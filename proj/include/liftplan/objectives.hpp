#pragma once

#include <functional>
#include <iosfwd>
#include <optional>

#include "liftplan/worldmodel.hpp"

namespace liftplan {

// Fixed-goal planning instance: reach g from s0 in exactly `horizon` steps.
struct PlanProblem {
  const WorldModel* model = nullptr;
  Vec s0;
  Vec goal;
  std::size_t horizon = 0;

  void validate() const;
};

// Gradients of a trajectory loss. d_states covers the free states
// s_1..s_{T-1} only; the boundary states are constants and never receive a
// gradient. Entries stay zero where stop-gradient blocks flow.
struct LossGrads {
  std::vector<Vec> d_states;   // size T-1
  std::vector<Vec> d_actions;  // size T
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t at_step)
      : std::runtime_error(what), step(at_step) {}
  std::size_t step;
};

// ||s_T(a, s0) - g||^2 with full backpropagation through the rollout.
// d_actions (optional) is filled by a reverse sweep chaining vjp_state
// through time. Throws DivergenceError naming the step whose state went
// non-finite.
double shooting_value_grad(const PlanProblem& prob, const std::vector<Vec>& actions,
                           std::vector<Vec>* d_actions = nullptr);

// sum_t ||F(s_t, a_t) - s_{t+1}||^2 over a trajectory with s_0 = prob.s0 and
// s_T = g pinned (argument error otherwise). Full gradients through both the
// state inputs and the next states.
double lifted_value_grad(const PlanProblem& prob, const Trajectory& traj,
                         LossGrads* grads = nullptr);

// sum_t ||F(sg(s_t), a_t) - s_{t+1}||^2 + sum_t w_t ||F(sg(s_t), a_t) - g||^2
// with the state inputs behind a stop-gradient: free states only receive the
// -2 (F(sg(s_t), a_t) - s_{t+1}) term, actions the full vjp. step_weights
// (optional, length T) overrides the constant gamma per step.
double grasp_value_grad(const PlanProblem& prob, const Trajectory& traj, double gamma,
                        LossGrads* grads = nullptr,
                        std::span<const double> step_weights = {});

// Loss field over center + alpha*u + beta*v for two random orthonormal
// directions, alpha/beta on a uniform grid in [-radius, radius]. Row-major,
// alpha varying slowest.
struct LandscapeField {
  std::size_t grid = 0;
  double radius = 0.0;
  Vec offsets;  // grid coordinates shared by alpha and beta
  Vec values;   // grid*grid, row-major
  Vec u, v;     // the orthonormal directions actually used
};

LandscapeField landscape_slice(const std::function<double(std::span<const double>)>& loss,
                               std::span<const double> center, RngStream& rng,
                               std::size_t grid, double radius);

// header "alpha,beta,loss", one row per grid point in row-major order
void write_landscape_csv(const LandscapeField& field, std::ostream& os);

}  // namespace liftplan
