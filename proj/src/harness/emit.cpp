#include <cmath>
#include <ostream>
#include <sstream>

#include "liftplan/harness.hpp"

namespace liftplan::harness {
namespace {

constexpr std::uint64_t kLandscapeStream = 0x5c;

std::vector<Vec> unflatten_actions(std::span<const double> flat, std::size_t T,
                                   std::size_t k) {
  std::vector<Vec> actions(T, Vec(k));
  for (std::size_t t = 0; t < T; ++t)
    std::copy(flat.begin() + t * k, flat.begin() + (t + 1) * k, actions[t].begin());
  return actions;
}

}  // namespace

void emit_landscape(const TrialSpec& spec, const std::string& loss_kind,
                    std::size_t grid, double radius, std::ostream& os) {
  RunArtifacts art = run_trial_full(spec);
  const WorldModel& model = *art.world.model;
  const std::size_t T = spec.horizon;
  const std::size_t k = model.action_dim();

  PlanProblem prob;
  prob.model = &model;
  prob.s0 = art.world.s0;
  prob.goal = art.world.goal;
  prob.horizon = T;

  Vec center;
  center.reserve(T * k);
  for (const Vec& a : art.plan.actions) center.insert(center.end(), a.begin(), a.end());

  std::function<double(std::span<const double>)> loss;
  if (loss_kind == "shooting") {
    loss = [&](std::span<const double> flat) {
      try {
        const double v = shooting_value_grad(prob, unflatten_actions(flat, T, k), nullptr);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
      } catch (const DivergenceError&) {
        return std::numeric_limits<double>::max();
      }
    };
  } else if (loss_kind == "grasp") {
    // converged states: rollout of the converged actions with s_T pinned to g
    Trajectory traj = rollout(model, prob.s0, art.plan.actions);
    traj.states[T] = prob.goal;
    const double gamma = spec.planner.contains("gamma")
                             ? spec.planner.at("gamma").get<double>()
                             : GraspConfig{}.gamma;
    loss = [&prob, traj, gamma, T, k](std::span<const double> flat) {
      Trajectory probe = traj;
      probe.actions = unflatten_actions(flat, T, k);
      const double v = grasp_value_grad(prob, probe, gamma, nullptr);
      return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };
  } else {
    throw ConfigError("landscape: loss kind must be 'shooting' or 'grasp'");
  }

  RngStream rng(spec.seed, kLandscapeStream);
  const LandscapeField field = landscape_slice(loss, center, rng, grid, radius);
  write_landscape_csv(field, os);
}

void emit_distance_profile(const TrialSpec& spec, std::ostream& os) {
  RunArtifacts art = run_trial_full(spec);
  if (!art.report.success)
    throw std::runtime_error("distance profile: trial did not succeed (final distance " +
                             std::to_string(art.report.final_distance) + ")");
  os << "t,distance\n";
  char buf[64];
  for (std::size_t t = 0; t < art.executed.states.size(); ++t) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", t,
                  norm2(sub(art.executed.states[t], art.world.goal)));
    os << buf;
  }
}

std::vector<CurvePoint> cumulative_success_curve(const BatteryReport& report,
                                                 const Vec& time_grid) {
  const std::size_t n = report.trials.size();
  std::vector<CurvePoint> curve;
  curve.reserve(time_grid.size());
  for (double tau : time_grid) {
    std::size_t solved = 0;
    for (const auto& r : report.trials)
      if (r.success && r.time <= tau) ++solved;
    CurvePoint p;
    p.tau = tau;
    p.fraction = n ? static_cast<double>(solved) / static_cast<double>(n) : 0.0;
    p.ci_half_width = wald_half_width(p.fraction, n);
    curve.push_back(p);
  }
  return curve;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream os;
  os << "tau,fraction,ci_half_width\n";
  char buf[96];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.tau, p.fraction,
                  p.ci_half_width);
    os << buf;
  }
  return os.str();
}

}  // namespace liftplan::harness
