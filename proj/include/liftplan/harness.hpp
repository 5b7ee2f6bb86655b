#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "liftplan/planners.hpp"

namespace liftplan::harness {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Report times are deterministic virtual seconds: model evaluations inside
// the planner call (forward and vjp calls alike) at a fixed nominal rate.
// Wall-clock stays in PlanResult / logs and never enters a report, so
// rerunning a config reproduces every report byte for byte.
inline constexpr double kSecondsPerEval = 1e-6;

struct WorldInstance {
  std::unique_ptr<WorldModel> model;
  Vec s0;
  Vec goal;
};

// World specs are JSON objects; unknown fields are rejected. Types:
//   linear    {A, B, c?, s0, g}
//   free2d    {step_scale?, s0, g}
//   wall      {walls: [[x1,y1,x2,y2,thickness]...], stiffness?, step_scale?, s0, g}
//   wall_gate {wall_x?, y_bottom?, y_top?, thickness?, stiffness?, step_scale?,
//              jitter?, s0?, g?}  (jitter displaces s0.y, g.y and y_top per seed)
WorldInstance make_world(const json& spec, std::uint64_t seed);

struct TrialSpec {
  json world;
  json planner;
  std::size_t horizon = 0;
  double success_radius = 0.0;
  std::uint64_t seed = 0;
  double time_limit = std::numeric_limits<double>::infinity();
  json model;  // empty or {"type":"true"} | {"type":"file","path":...} | {"type":"inline","model":...}
  std::string cell;

  void validate() const;
  json to_json() const;
};
TrialSpec trial_spec_from_json(const json& j);

struct TrialReport {
  bool success = false;
  bool timeout = false;
  bool diverged = false;
  double time = 0.0;  // virtual seconds
  double final_distance = 0.0;
  std::size_t iterations = 0;
  std::uint64_t model_evals = 0;
  std::string cell;
  std::uint64_t seed = 0;
  std::string config_hash;
};
json trial_report_to_json(const TrialReport& r);

TrialReport run_trial(const TrialSpec& spec);

// Everything run_trial computes, for the emit operations.
struct RunArtifacts {
  TrialReport report;
  PlanResult plan;
  Trajectory executed;  // open-loop rollout on the true world
  WorldInstance world;
};
RunArtifacts run_trial_full(const TrialSpec& spec);

PlanResult dispatch_planner(const json& planner_spec, const PlanProblem& prob,
                            RngStream& rng);

struct CellStats {
  std::size_t n = 0;
  std::size_t successes = 0;
  double success_pct = 0.0;
  double median_time = 0.0;  // over successful trials only; NaN when none
  double ci_half_width = 0.0;
};

struct BatteryReport {
  json config;
  std::string config_hash;
  std::map<std::string, CellStats> cells;
  std::vector<TrialReport> trials;
};

// Expand a bench config (cells = planners x horizons, `trials` per cell,
// derived per-trial seeds) into concrete trial specs.
std::vector<TrialSpec> battery_specs_from_config(const json& config);

// All trials with a worker pool; aggregation is order- and worker-count-
// independent. Individual trial failures are recorded, never fatal.
BatteryReport run_battery(const std::vector<TrialSpec>& specs, int workers);

json battery_report_to_json(const BatteryReport& report);
std::string battery_trials_csv(const BatteryReport& report);

double wald_half_width(double p, std::size_t n);
std::string fnv1a_hex(std::string_view bytes);

// Runs the planner to convergence, slices the chosen loss around the
// converged flat action vector, writes CSV.
void emit_landscape(const TrialSpec& spec, const std::string& loss_kind,
                    std::size_t grid, double radius, std::ostream& os);

// CSV "t,distance" of ||s_t - g|| along the executed rollout; throws when the
// trial did not succeed.
void emit_distance_profile(const TrialSpec& spec, std::ostream& os);

struct CurvePoint {
  double tau = 0.0;
  double fraction = 0.0;
  double ci_half_width = 0.0;
};
std::vector<CurvePoint> cumulative_success_curve(const BatteryReport& report,
                                                 const Vec& time_grid);
std::string curve_csv(const std::vector<CurvePoint>& curve);

}  // namespace liftplan::harness
