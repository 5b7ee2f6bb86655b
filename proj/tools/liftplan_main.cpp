#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "liftplan/harness.hpp"
#include "liftplan/model_io.hpp"
#include "liftplan/theory.hpp"
#include "liftplan/version.hpp"

namespace {

using liftplan::harness::ConfigError;
using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("bad JSON in ") + path + ": " + e.what());
  }
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

int run_plan(const std::string& config_path, std::int64_t seed_override,
             const std::string& out) {
  json j = load_json(config_path);
  if (seed_override >= 0) j["seed"] = static_cast<std::uint64_t>(seed_override);
  const auto spec = liftplan::harness::trial_spec_from_json(j);
  const auto art = liftplan::harness::run_trial_full(spec);
  std::fprintf(stderr, "planner wall clock: %.3fs (reported virtual time %.6gs)\n",
               art.plan.wall_clock, art.report.time);
  json report = liftplan::harness::trial_report_to_json(art.report);
  report["toolkit"] = liftplan::kToolkitVersion;
  report["config"] = spec.to_json();
  write_text(out, report.dump(2) + "\n");
  return 0;
}

int run_bench(const std::string& config_path, std::int64_t seed_override, int workers,
              const std::string& out) {
  json config = load_json(config_path);
  if (seed_override >= 0) config["seed"] = static_cast<std::uint64_t>(seed_override);
  const auto specs = liftplan::harness::battery_specs_from_config(config);
  auto battery = liftplan::harness::run_battery(specs, workers);
  battery.config = config;
  battery.config_hash = liftplan::harness::fnv1a_hex(config.dump());
  const std::string text = liftplan::harness::battery_report_to_json(battery).dump(2) + "\n";
  write_text(out, text);
  if (!out.empty() && out != "-")
    write_text(out + ".trials.csv", liftplan::harness::battery_trials_csv(battery));
  return 0;
}

int run_landscape(const std::string& config_path, const std::string& loss,
                  std::size_t grid, double radius, const std::string& out) {
  const auto spec = liftplan::harness::trial_spec_from_json(load_json(config_path));
  std::ostringstream os;
  liftplan::harness::emit_landscape(spec, loss, grid, radius, os);
  write_text(out, os.str());
  return 0;
}

int run_profile(const std::string& config_path, const std::string& out) {
  const auto spec = liftplan::harness::trial_spec_from_json(load_json(config_path));
  std::ostringstream os;
  liftplan::harness::emit_distance_profile(spec, os);
  write_text(out, os.str());
  return 0;
}

int run_curve(const std::string& in_path, std::size_t points, const std::string& out) {
  const json j = load_json(in_path);
  liftplan::harness::BatteryReport battery;
  if (!j.contains("trials")) throw ConfigError("curve: input is not a battery report");
  for (const auto& t : j.at("trials")) {
    liftplan::harness::TrialReport r;
    r.success = t.at("success").get<bool>();
    r.time = t.at("time").get<double>();
    r.cell = t.at("cell").get<std::string>();
    battery.trials.push_back(r);
  }
  double tmax = 0.0;
  for (const auto& r : battery.trials) tmax = std::max(tmax, r.time);
  if (tmax <= 0.0) tmax = 1.0;
  liftplan::Vec grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = tmax * static_cast<double>(i) / static_cast<double>(points - 1);
  const auto curve = liftplan::harness::cumulative_success_curve(battery, grid);
  write_text(out, liftplan::harness::curve_csv(curve));
  return 0;
}

int run_theory_check(std::uint64_t seed, const std::string& out) {
  const auto results = liftplan::theory::run_standard_checks(seed);
  json arr = json::array();
  bool all_pass = true;
  for (const auto& r : results) {
    arr.push_back({{"check_name", r.name},
                   {"status", r.pass ? "pass" : "fail"},
                   {"observed", r.observed},
                   {"bound", r.bound},
                   {"margin", r.margin}});
    all_pass = all_pass && r.pass;
    std::fprintf(stderr, "[%s] %s observed=%.6g bound=%.6g margin=%.6g\n",
                 r.pass ? "pass" : "FAIL", r.name.c_str(), r.observed, r.bound, r.margin);
  }
  write_text(out, arr.dump(2) + "\n");
  return all_pass ? 0 : 2;
}

int run_train_model(const std::string& config_path, std::int64_t seed_override,
                    const std::string& out) {
  json config = load_json(config_path);
  for (const auto& [key, value] : config.items()) {
    static const std::set<std::string> allowed = {
        "world",  "seed",   "samples",       "episode_length", "action_std",
        "start_box", "hidden", "epochs", "lr",            "mse_threshold"};
    if (!allowed.count(key)) throw ConfigError("train config: unknown field '" + key + "'");
  }
  const std::uint64_t seed = seed_override >= 0 ? static_cast<std::uint64_t>(seed_override)
                             : config.contains("seed") ? config.at("seed").get<std::uint64_t>()
                                                       : 0;
  auto world = liftplan::harness::make_world(config.at("world"), seed);
  const std::size_t samples =
      config.contains("samples") ? config.at("samples").get<std::size_t>() : 2000;
  const std::size_t ep_len =
      config.contains("episode_length") ? config.at("episode_length").get<std::size_t>() : 5;
  const double action_std =
      config.contains("action_std") ? config.at("action_std").get<double>() : 1.0;
  const double box = config.contains("start_box") ? config.at("start_box").get<double>() : 1.5;

  // short rollouts under random actions from random starts
  liftplan::RngStream rng(seed, 0x7a);
  std::vector<liftplan::Transition> data;
  data.reserve(samples);
  const std::size_t n = world.model->state_dim();
  const std::size_t k = world.model->action_dim();
  while (data.size() < samples) {
    liftplan::Vec s(n);
    for (auto& v : s) v = rng.uniform(-box, box);
    for (std::size_t step = 0; step < ep_len && data.size() < samples; ++step) {
      const liftplan::Vec a = liftplan::gauss_vec(rng, k, action_std);
      liftplan::Vec next = world.model->forward(s, a);
      data.push_back({s, a, next});
      s = std::move(next);
    }
  }

  liftplan::MlpTrainConfig cfg;
  if (config.contains("hidden"))
    cfg.hidden = config.at("hidden").get<std::vector<std::size_t>>();
  else
    cfg.hidden = {64, 64};
  if (config.contains("epochs")) cfg.epochs = config.at("epochs").get<std::size_t>();
  if (config.contains("lr")) cfg.lr = config.at("lr").get<double>();
  if (config.contains("mse_threshold"))
    cfg.mse_threshold = config.at("mse_threshold").get<double>();

  liftplan::RngStream train_rng(seed, 0x7b);
  const auto model = liftplan::train_mlp(data, cfg, train_rng);
  std::fprintf(stderr, "train-model: held-out MSE %.6g\n", model.training_loss);
  write_text(out, liftplan::model_to_json(model).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(liftplan::kToolkitVersion) +
               " - lifted stochastic planning toolkit"};
  app.require_subcommand(1);

  std::string config_path, out = "-", in_path, loss = "shooting";
  std::int64_t seed = -1;
  int workers = 1;
  std::size_t grid = 33, points = 64;
  double radius = 0.5;

  auto* plan = app.add_subcommand("plan", "run one trial, print its report as JSON");
  plan->add_option("--config", config_path, "trial spec JSON")->required();
  plan->add_option("--seed", seed, "override the config seed");
  plan->add_option("--out", out, "output path ('-' for stdout)");

  auto* bench = app.add_subcommand("bench", "run a trial battery from a config");
  bench->add_option("--config", config_path, "battery config JSON")->required();
  bench->add_option("--seed", seed, "override the config seed");
  bench->add_option("--workers", workers, "worker threads");
  bench->add_option("--out", out, "battery report path (also writes <out>.trials.csv)");

  auto* land = app.add_subcommand("landscape", "loss slice around a converged plan");
  land->add_option("--config", config_path, "trial spec JSON")->required();
  land->add_option("--loss", loss, "shooting | grasp");
  land->add_option("--grid", grid, "grid points per axis");
  land->add_option("--radius", radius, "slice half-width");
  land->add_option("--out", out, "CSV output path");

  auto* prof = app.add_subcommand("profile", "distance-to-goal profile of a successful trial");
  prof->add_option("--config", config_path, "trial spec JSON")->required();
  prof->add_option("--out", out, "CSV output path");

  auto* curve = app.add_subcommand("curve", "cumulative success curve from a battery report");
  curve->add_option("--in", in_path, "battery report JSON")->required();
  curve->add_option("--points", points, "time grid size");
  curve->add_option("--out", out, "CSV output path");

  auto* theory = app.add_subcommand("theory-check", "run the verification battery, emit JSON");
  theory->add_option("--seed", seed, "seed for the Monte-Carlo checks");
  theory->add_option("--out", out, "JSON output path");

  auto* train = app.add_subcommand("train-model", "train an MLP world model, save JSON");
  train->add_option("--config", config_path, "training config JSON")->required();
  train->add_option("--seed", seed, "override the config seed");
  train->add_option("--out", out, "model JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (plan->parsed()) return run_plan(config_path, seed, out);
    if (bench->parsed()) return run_bench(config_path, seed, workers, out);
    if (land->parsed()) return run_landscape(config_path, loss, grid, radius, out);
    if (prof->parsed()) return run_profile(config_path, out);
    if (curve->parsed()) return run_curve(in_path, points, out);
    if (theory->parsed())
      return run_theory_check(seed >= 0 ? static_cast<std::uint64_t>(seed) : 1, out);
    if (train->parsed()) return run_train_model(config_path, seed, out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 2;
  }
  return 0;
}
