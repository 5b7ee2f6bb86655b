#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "liftplan/harness.hpp"

using namespace liftplan;
using namespace liftplan::harness;

namespace {

json free2d_world(Vec s0, Vec g) {
  return {{"type", "free2d"}, {"step_scale", 0.1}, {"s0", s0}, {"g", g}};
}

json gate_world(double jitter = 0.0) {
  json w = {{"type", "wall_gate"}, {"jitter", jitter}};
  return w;
}

TrialSpec basic_trial(const json& world, const json& planner, std::size_t horizon,
                      std::uint64_t seed) {
  TrialSpec spec;
  spec.world = world;
  spec.planner = planner;
  spec.horizon = horizon;
  spec.success_radius = 0.1;
  spec.seed = seed;
  return spec;
}

std::vector<double> csv_losses(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> out;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    out.push_back(std::stod(line.substr(pos + 1)));
  }
  return out;
}

// total variation of a normalized field, used as the ruggedness statistic
double tv_statistic(const std::vector<double>& field, std::size_t grid) {
  double mean_abs = 0.0;
  for (double v : field) mean_abs += std::abs(v);
  mean_abs /= static_cast<double>(field.size());
  if (mean_abs == 0.0) return 0.0;
  double tv = 0.0;
  for (std::size_t i = 0; i < grid; ++i)
    for (std::size_t j = 0; j < grid; ++j) {
      if (i + 1 < grid)
        tv += std::abs(field[(i + 1) * grid + j] - field[i * grid + j]);
      if (j + 1 < grid) tv += std::abs(field[i * grid + j + 1] - field[i * grid + j]);
    }
  return tv / mean_abs;
}

}  // namespace

TEST_CASE("make_world: unknown fields are rejected") {
  json w = free2d_world({0, 0}, {1, 1});
  w["bogus"] = 1;
  CHECK_THROWS_AS(make_world(w, 0), ConfigError);
  json lin = {{"type", "linear"}, {"A", {{1.0}}}, {"B", {{1.0}}},
              {"s0", {0.0}},      {"g", {1.0}},   {"extra", true}};
  CHECK_THROWS_AS(make_world(lin, 0), ConfigError);
}

TEST_CASE("make_world: wall_gate jitter is deterministic per seed") {
  const json w = gate_world(0.2);
  const auto a = make_world(w, 5);
  const auto b = make_world(w, 5);
  const auto c = make_world(w, 6);
  CHECK(a.s0 == b.s0);
  CHECK(a.goal == b.goal);
  CHECK(a.s0 != c.s0);
}

TEST_CASE("trial spec: success_radius is required") {
  json j = {{"world", free2d_world({0, 0}, {1, 1})},
            {"planner", {{"type", "gd"}}},
            {"horizon", 10}};
  CHECK_THROWS_AS(trial_spec_from_json(j), ConfigError);
  j["success_radius"] = 0.1;
  CHECK_NOTHROW(trial_spec_from_json(j));
}

TEST_CASE("planner dispatch: unknown planner fields are rejected") {
  auto spec = basic_trial(free2d_world({0, 0}, {0.5, 0.5}),
                          json{{"type", "gd"}, {"step", 10}}, 5, 1);
  CHECK_THROWS_AS(run_trial(spec), ConfigError);
}

TEST_CASE("run_trial: start at the goal succeeds immediately for every planner") {
  const json world = free2d_world({0.3, 0.3}, {0.3, 0.3});
  const std::vector<json> planners = {
      {{"type", "gd"}, {"steps", 50}, {"eta", 0.1}},
      {{"type", "lifted"}, {"steps", 50}},
      {{"type", "grasp"}, {"steps", 50}, {"k_sync", 10}, {"j_sync", 2}},
      {{"type", "cem"}, {"population", 32}, {"elites", 4}, {"iterations", 5}},
      {{"type", "gd_noisy"}, {"steps", 50}, {"sigma_a", 0.1}},
  };
  for (const auto& planner : planners) {
    const auto rep = run_trial(basic_trial(world, planner, 8, 3));
    CAPTURE(planner.dump());
    CHECK(rep.success);
    CHECK(rep.final_distance <= 1e-12);
    CHECK(rep.time < 0.1);
  }
}

TEST_CASE("run_trial: reachable linear goal with plan_gd succeeds") {
  json world = {{"type", "linear"},
                {"A", {{1.0, 0.0}, {0.0, 1.0}}},
                {"B", {{1.0, 0.0}, {0.0, 1.0}}},
                {"s0", {0.0, 0.0}},
                {"g", {0.8, -0.6}}};
  const auto rep = run_trial(
      basic_trial(world, json{{"type", "gd"}, {"steps", 300}, {"eta", 0.1}}, 6, 4));
  CHECK(rep.success);
  CHECK_FALSE(rep.diverged);
}

TEST_CASE("run_trial: deterministic virtual time triggers the timeout flag") {
  auto spec = basic_trial(free2d_world({0, 0}, {1, 1}),
                          json{{"type", "gd"}, {"steps", 200}, {"eta", 0.1}}, 20, 5);
  spec.time_limit = 1e-9;  // below any possible eval budget
  const auto rep = run_trial(spec);
  CHECK(rep.timeout);
  CHECK_FALSE(rep.success);
  CHECK_FALSE(rep.diverged);
}

TEST_CASE("wald_half_width: p = 0.5, N = 500 gives about 0.0438") {
  CHECK(wald_half_width(0.5, 500) == doctest::Approx(0.043826932).epsilon(1e-6));
}

TEST_CASE("run_battery: single trial report equals the direct run") {
  auto spec = basic_trial(free2d_world({0, 0}, {0.6, 0.2}),
                          json{{"type", "gd"}, {"steps", 150}, {"eta", 0.1}}, 8, 9);
  spec.cell = "gd@H8";
  const auto direct = run_trial(spec);
  const auto battery = run_battery({spec}, 1);
  REQUIRE(battery.trials.size() == 1);
  CHECK(trial_report_to_json(battery.trials[0]) == trial_report_to_json(direct));
  const auto& stats = battery.cells.at("gd@H8");
  CHECK(stats.n == 1);
  CHECK(stats.successes == (direct.success ? 1u : 0u));
}

TEST_CASE("run_battery: report bytes identical for 1 and 8 workers") {
  json config = {{"seed", 11},
                 {"trials", 6},
                 {"success_radius", 0.1},
                 {"horizons", {6, 10}},
                 {"world", gate_world(0.15)},
                 {"planners",
                  {{{"label", "gd"}, {"planner", {{"type", "gd"}, {"steps", 60}, {"eta", 0.1}}}},
                   {{"label", "grasp"},
                    {"planner", {{"type", "grasp"}, {"steps", 60}, {"k_sync", 20}, {"j_sync", 3}}}}}}};
  const auto specs = battery_specs_from_config(config);
  CHECK(specs.size() == 6 * 2 * 2);

  auto report_bytes = [&](int workers) {
    auto battery = run_battery(specs, workers);
    battery.config = config;
    battery.config_hash = fnv1a_hex(config.dump());
    return battery_report_to_json(battery).dump(2);
  };
  const std::string one = report_bytes(1);
  const std::string eight = report_bytes(8);
  CHECK(one == eight);

  // re-running from the embedded config reproduces the report byte-identically
  const json embedded = json::parse(one).at("config");
  auto battery2 = run_battery(battery_specs_from_config(embedded), 3);
  battery2.config = embedded;
  battery2.config_hash = fnv1a_hex(embedded.dump());
  CHECK(battery_report_to_json(battery2).dump(2) == one);
}

TEST_CASE("run_battery: unknown bench config fields are rejected") {
  json config = {{"seed", 1},
                 {"trials", 2},
                 {"success_radius", 0.1},
                 {"horizons", {4}},
                 {"world", gate_world()},
                 {"planners", {{{"label", "gd"}, {"planner", {{"type", "gd"}}}}}},
                 {"typo_field", 3}};
  CHECK_THROWS_AS(battery_specs_from_config(config), ConfigError);
}

TEST_CASE("emit_landscape: grid 3 yields 9 rows plus header; radius 0 is flat") {
  auto spec = basic_trial(free2d_world({0, 0}, {0.5, 0.0}),
                          json{{"type", "gd"}, {"steps", 100}, {"eta", 0.1}}, 5, 21);
  std::ostringstream os;
  emit_landscape(spec, "shooting", 3, 0.25, os);
  const std::string csv = os.str();
  std::size_t rows = 0;
  for (char c : csv) rows += (c == '\n');
  CHECK(rows == 10);
  CHECK(csv.rfind("alpha,beta,loss\n", 0) == 0);

  std::ostringstream flat;
  emit_landscape(spec, "shooting", 3, 0.0, flat);
  const auto losses = csv_losses(flat.str());
  for (double v : losses) CHECK(v == doctest::Approx(losses.front()));
}

TEST_CASE("emit_distance_profile: at the goal the profile is identically zero") {
  auto spec = basic_trial(free2d_world({0.2, -0.1}, {0.2, -0.1}),
                          json{{"type", "gd"}, {"steps", 30}, {"eta", 0.1}}, 6, 22);
  std::ostringstream os;
  emit_distance_profile(spec, os);
  const auto dists = csv_losses(os.str());
  CHECK(dists.size() == 7);
  for (double d : dists) CHECK(d == 0.0);
}

TEST_CASE("emit_distance_profile: free-space optimum decreases monotonically") {
  auto spec = basic_trial(free2d_world({-0.6, 0.0}, {0.6, 0.0}),
                          json{{"type", "gd"}, {"steps", 400}, {"eta", 0.1}}, 15, 23);
  std::ostringstream os;
  emit_distance_profile(spec, os);
  const auto dists = csv_losses(os.str());
  REQUIRE(dists.size() == 16);
  for (std::size_t t = 0; t + 1 < dists.size(); ++t)
    CHECK(dists[t + 1] <= dists[t] + 1e-9);
}

TEST_CASE("emit_distance_profile: failed trial raises an error") {
  auto spec = basic_trial(free2d_world({-0.9, 0.0}, {0.9, 0.0}),
                          json{{"type", "gd"}, {"steps", 2}, {"eta", 1e-6}}, 4, 24);
  std::ostringstream os;
  CHECK_THROWS_AS(emit_distance_profile(spec, os), std::runtime_error);
}

TEST_CASE("cumulative_success_curve: flat at zero, monotone, endpoint consistent") {
  BatteryReport battery;
  for (int i = 0; i < 10; ++i) {
    TrialReport r;
    r.success = false;
    r.time = 0.01 * (i + 1);
    battery.trials.push_back(r);
  }
  Vec grid = {0.0, 0.05, 0.1, 0.2};
  auto curve = cumulative_success_curve(battery, grid);
  for (const auto& p : curve) CHECK(p.fraction == 0.0);

  for (int i = 0; i < 10; ++i) battery.trials[i].success = (i % 2 == 0);
  curve = cumulative_success_curve(battery, grid);
  for (std::size_t i = 0; i + 1 < curve.size(); ++i)
    CHECK(curve[i].fraction <= curve[i + 1].fraction);
  CHECK(curve.back().fraction == doctest::Approx(0.5));
}

TEST_CASE("landscape ruggedness: shooting slices rougher than grasp slices") {
  // frozen statistic: normalized total variation of the shooting-loss slice
  // exceeds the grasp-loss slice around converged plans on the gate world
  const std::size_t grid = 15;
  int rough_wins = 0;
  const int seeds = 10;
  for (int seed = 0; seed < seeds; ++seed) {
    auto gd_spec = basic_trial(gate_world(0.35),
                               json{{"type", "gd"}, {"steps", 500}, {"eta", 1.0}}, 40,
                               1000 + seed);
    auto grasp_spec = basic_trial(
        gate_world(0.35),
        json{{"type", "grasp"}, {"steps", 800}, {"eta_a", 0.2}, {"eta_s", 0.2},
             {"sigma_state", 0.5}, {"gamma", 0.05}, {"k_sync", 150}, {"j_sync", 60},
             {"eta_sync", 0.3}},
        40, 1000 + seed);
    std::ostringstream shoot_csv, grasp_csv;
    emit_landscape(gd_spec, "shooting", grid, 0.8, shoot_csv);
    emit_landscape(grasp_spec, "grasp", grid, 0.8, grasp_csv);
    const double tv_shoot = tv_statistic(csv_losses(shoot_csv.str()), grid);
    const double tv_grasp = tv_statistic(csv_losses(grasp_csv.str()), grid);
    CAPTURE(seed);
    CAPTURE(tv_shoot);
    CAPTURE(tv_grasp);
    if (tv_shoot / tv_grasp > 1.0) ++rough_wins;
  }
  CHECK(rough_wins >= 8);
}
