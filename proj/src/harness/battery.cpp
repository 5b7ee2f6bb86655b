#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "liftplan/harness.hpp"
#include "liftplan/version.hpp"

namespace liftplan::harness {
namespace {

std::uint64_t derive_trial_seed(std::uint64_t base, std::size_t cell, std::size_t trial) {
  return mix64(mix64(base + 0x9e3779b97f4a7c15ULL * (cell + 1)) +
               0xbf58476d1ce4e5b9ULL * (trial + 1));
}

}  // namespace

double wald_half_width(double p, std::size_t n) {
  if (n == 0) return 0.0;
  return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

std::vector<TrialSpec> battery_specs_from_config(const json& config) {
  for (const auto& [key, value] : config.items()) {
    static const std::set<std::string> allowed = {
        "seed", "trials", "success_radius", "time_limit", "horizons", "world",
        "planners", "model"};
    if (!allowed.count(key)) throw ConfigError("bench config: unknown field '" + key + "'");
  }
  if (!config.contains("world") || !config.contains("planners") ||
      !config.contains("horizons"))
    throw ConfigError("bench config: 'world', 'planners' and 'horizons' are required");
  if (!config.contains("success_radius"))
    throw ConfigError("bench config: 'success_radius' is required (no default)");

  const std::uint64_t seed = config.contains("seed") ? config.at("seed").get<std::uint64_t>() : 0;
  const std::size_t trials = config.contains("trials") ? config.at("trials").get<std::size_t>() : 100;
  if (trials < 1) throw ConfigError("bench config: trials must be >= 1");

  std::vector<TrialSpec> specs;
  std::size_t cell_index = 0;
  for (const auto& planner_entry : config.at("planners")) {
    if (!planner_entry.contains("label") || !planner_entry.contains("planner"))
      throw ConfigError("bench config: each planners[] entry needs 'label' and 'planner'");
    for (const auto& [key, value] : planner_entry.items())
      if (key != "label" && key != "planner")
        throw ConfigError("bench config planners[]: unknown field '" + key + "'");
    const std::string label = planner_entry.at("label").get<std::string>();
    for (const auto& h : config.at("horizons")) {
      TrialSpec base;
      base.world = config.at("world");
      base.planner = planner_entry.at("planner");
      base.horizon = h.get<std::size_t>();
      base.success_radius = config.at("success_radius").get<double>();
      if (config.contains("time_limit")) base.time_limit = config.at("time_limit").get<double>();
      if (config.contains("model")) base.model = config.at("model");
      base.cell = label + "@H" + std::to_string(base.horizon);
      for (std::size_t t = 0; t < trials; ++t) {
        TrialSpec spec = base;
        spec.seed = derive_trial_seed(seed, cell_index, t);
        spec.validate();
        specs.push_back(std::move(spec));
      }
      ++cell_index;
    }
  }
  return specs;
}

BatteryReport run_battery(const std::vector<TrialSpec>& specs, int workers) {
  if (specs.empty()) throw ConfigError("run_battery: no trials");

  std::vector<TrialReport> reports(specs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      try {
        reports[i] = run_trial(specs[i]);
      } catch (const std::exception& e) {
        // record, never abort the battery
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) {
          first_error = e.what();
          std::fprintf(stderr, "battery: trial %zu failed: %s\n", i, first_error.c_str());
        }
        reports[i] = TrialReport{};
        reports[i].cell = specs[i].cell;
        reports[i].seed = specs[i].seed;
        reports[i].diverged = true;
        reports[i].final_distance = std::numeric_limits<double>::max();
        reports[i].config_hash = fnv1a_hex(specs[i].to_json().dump());
      }
    }
  };

  const int nthreads = std::max(1, workers);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  BatteryReport battery;
  battery.trials = std::move(reports);

  // success implies the re-checked distance is inside the radius
  for (std::size_t i = 0; i < battery.trials.size(); ++i)
    if (battery.trials[i].success &&
        battery.trials[i].final_distance > specs[i].success_radius)
      throw std::logic_error("battery: success recorded with distance outside the radius");

  std::map<std::string, std::vector<const TrialReport*>> by_cell;
  for (const auto& r : battery.trials) by_cell[r.cell].push_back(&r);
  for (const auto& [cell, rs] : by_cell) {
    CellStats stats;
    stats.n = rs.size();
    Vec times;
    for (const TrialReport* r : rs)
      if (r->success) {
        ++stats.successes;
        times.push_back(r->time);
      }
    stats.success_pct = 100.0 * static_cast<double>(stats.successes) /
                        static_cast<double>(stats.n);
    std::sort(times.begin(), times.end());
    if (times.empty())
      stats.median_time = -1.0;  // no successful trials
    else if (times.size() % 2 == 1)
      stats.median_time = times[times.size() / 2];
    else
      stats.median_time = 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
    stats.ci_half_width = wald_half_width(
        static_cast<double>(stats.successes) / static_cast<double>(stats.n), stats.n);
    battery.cells[cell] = stats;
  }
  return battery;
}

json battery_report_to_json(const BatteryReport& report) {
  json j;
  j["toolkit"] = kToolkitVersion;
  j["config"] = report.config;
  j["config_hash"] = report.config_hash;
  json cells = json::object();
  for (const auto& [name, stats] : report.cells) {
    cells[name] = {{"n", stats.n},
                   {"successes", stats.successes},
                   {"success_pct", stats.success_pct},
                   {"median_time", stats.median_time},
                   {"ci_half_width", stats.ci_half_width}};
  }
  j["cells"] = cells;
  json trials = json::array();
  for (const auto& r : report.trials) trials.push_back(trial_report_to_json(r));
  j["trials"] = trials;
  return j;
}

std::string battery_trials_csv(const BatteryReport& report) {
  std::ostringstream os;
  os << "cell,seed,success,timeout,diverged,time,final_distance,iterations,model_evals\n";
  char buf[64];
  for (const auto& r : report.trials) {
    os << r.cell << ',' << r.seed << ',' << (r.success ? 1 : 0) << ','
       << (r.timeout ? 1 : 0) << ',' << (r.diverged ? 1 : 0) << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", r.time);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", r.final_distance);
    os << buf << ',' << r.iterations << ',' << r.model_evals << '\n';
  }
  return os.str();
}

}  // namespace liftplan::harness
