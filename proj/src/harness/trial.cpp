#include <cmath>
#include <fstream>
#include <set>

#include "liftplan/harness.hpp"
#include "liftplan/model_io.hpp"

namespace liftplan::harness {
namespace {

constexpr std::uint64_t kPlanStream = 0x99;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& what) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(what + ": unknown field '" + key + "'");
}

double get_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

std::size_t get_or_size(const json& j, const char* key, std::size_t fallback) {
  return j.contains(key) ? j.at(key).get<std::size_t>() : fallback;
}

std::unique_ptr<WorldModel> planner_model(const TrialSpec& spec, const WorldInstance& world) {
  if (spec.model.is_null() || spec.model.empty()) return nullptr;  // plan on the true world
  const std::string type = spec.model.at("type").get<std::string>();
  if (type == "true") {
    reject_unknown(spec.model, {"type"}, "model");
    return nullptr;
  }
  std::unique_ptr<WorldModel> m;
  if (type == "file") {
    reject_unknown(spec.model, {"type", "path"}, "model");
    std::ifstream in(spec.model.at("path").get<std::string>());
    if (!in) throw ConfigError("model: cannot open " + spec.model.at("path").get<std::string>());
    json j;
    in >> j;
    m = model_from_json(j);
  } else if (type == "inline") {
    reject_unknown(spec.model, {"type", "model"}, "model");
    m = model_from_json(spec.model.at("model"));
  } else {
    throw ConfigError("model: unknown type '" + type + "'");
  }
  if (m->state_dim() != world.model->state_dim() ||
      m->action_dim() != world.model->action_dim())
    throw ConfigError("model: dims do not match the world");
  return m;
}

}  // namespace

void TrialSpec::validate() const {
  if (horizon < 1) throw ConfigError("trial: horizon must be >= 1");
  if (!(success_radius > 0.0)) throw ConfigError("trial: success_radius is required and must be > 0");
  if (!(time_limit > 0.0)) throw ConfigError("trial: time_limit must be > 0");
  if (!world.is_object()) throw ConfigError("trial: world spec is required");
  if (!planner.is_object()) throw ConfigError("trial: planner spec is required");
}

json TrialSpec::to_json() const {
  json j;
  j["world"] = world;
  j["planner"] = planner;
  j["horizon"] = horizon;
  j["success_radius"] = success_radius;
  j["seed"] = seed;
  if (std::isfinite(time_limit)) j["time_limit"] = time_limit;
  if (!model.is_null() && !model.empty()) j["model"] = model;
  if (!cell.empty()) j["cell"] = cell;
  return j;
}

TrialSpec trial_spec_from_json(const json& j) {
  reject_unknown(j,
                 {"world", "planner", "horizon", "success_radius", "seed", "time_limit",
                  "model", "cell"},
                 "trial");
  TrialSpec spec;
  if (!j.contains("world") || !j.contains("planner"))
    throw ConfigError("trial: 'world' and 'planner' are required");
  spec.world = j.at("world");
  spec.planner = j.at("planner");
  spec.horizon = get_or_size(j, "horizon", 0);
  if (!j.contains("success_radius"))
    throw ConfigError("trial: 'success_radius' is required (no default)");
  spec.success_radius = j.at("success_radius").get<double>();
  spec.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0;
  if (j.contains("time_limit")) spec.time_limit = j.at("time_limit").get<double>();
  if (j.contains("model")) spec.model = j.at("model");
  if (j.contains("cell")) spec.cell = j.at("cell").get<std::string>();
  spec.validate();
  return spec;
}

PlanResult dispatch_planner(const json& planner_spec, const PlanProblem& prob,
                            RngStream& rng) {
  if (!planner_spec.is_object() || !planner_spec.contains("type"))
    throw ConfigError("planner: missing 'type'");
  const std::string type = planner_spec.at("type").get<std::string>();

  if (type == "gd") {
    reject_unknown(planner_spec, {"type", "steps", "eta"}, "planner gd");
    return plan_gd(prob, get_or_size(planner_spec, "steps", 400),
                   get_or(planner_spec, "eta", 0.05), rng);
  }
  if (type == "gd_noisy") {
    reject_unknown(planner_spec, {"type", "steps", "eta", "sigma_a", "sigma_s"},
                   "planner gd_noisy");
    return plan_gd_noisy(prob, get_or_size(planner_spec, "steps", 400),
                         get_or(planner_spec, "eta", 0.05),
                         get_or(planner_spec, "sigma_a", 0.0),
                         get_or(planner_spec, "sigma_s", 0.0), rng);
  }
  if (type == "lifted") {
    reject_unknown(planner_spec,
                   {"type", "steps", "eta_a", "eta_s", "sigma_state", "init_eps"},
                   "planner lifted");
    return plan_lifted(prob, get_or_size(planner_spec, "steps", 800),
                       get_or(planner_spec, "eta_a", 0.2),
                       get_or(planner_spec, "eta_s", 0.2),
                       get_or(planner_spec, "sigma_state", 0.0), rng, nullptr,
                       get_or(planner_spec, "init_eps", -1.0));
  }
  if (type == "grasp") {
    reject_unknown(planner_spec,
                   {"type", "steps", "eta_a", "eta_s", "sigma_state", "gamma", "k_sync",
                    "j_sync", "eta_sync", "noise_decay", "init_eps", "no_sync"},
                   "planner grasp");
    GraspConfig cfg;
    cfg.steps = get_or_size(planner_spec, "steps", cfg.steps);
    cfg.eta_a = get_or(planner_spec, "eta_a", cfg.eta_a);
    cfg.eta_s = get_or(planner_spec, "eta_s", cfg.eta_s);
    cfg.sigma_state = get_or(planner_spec, "sigma_state", cfg.sigma_state);
    cfg.gamma = get_or(planner_spec, "gamma", cfg.gamma);
    cfg.k_sync = get_or_size(planner_spec, "k_sync", cfg.k_sync);
    cfg.j_sync = get_or_size(planner_spec, "j_sync", cfg.j_sync);
    cfg.eta_sync = get_or(planner_spec, "eta_sync", cfg.eta_sync);
    cfg.noise_decay = get_or(planner_spec, "noise_decay", cfg.noise_decay);
    cfg.init_eps = get_or(planner_spec, "init_eps", cfg.init_eps);
    if (planner_spec.contains("no_sync") && planner_spec.at("no_sync").get<bool>())
      cfg.k_sync = cfg.steps + 1;
    return plan_grasp(prob, cfg, rng);
  }
  if (type == "cem") {
    reject_unknown(planner_spec,
                   {"type", "population", "elites", "iterations", "init_std", "min_std"},
                   "planner cem");
    CemConfig cfg;
    cfg.population = get_or_size(planner_spec, "population", cfg.population);
    cfg.elites = get_or_size(planner_spec, "elites", cfg.elites);
    cfg.iterations = get_or_size(planner_spec, "iterations", cfg.iterations);
    cfg.init_std = get_or(planner_spec, "init_std", cfg.init_std);
    cfg.min_std = get_or(planner_spec, "min_std", cfg.min_std);
    return plan_cem(prob, cfg, rng);
  }
  throw ConfigError("planner: unknown type '" + type + "'");
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

RunArtifacts run_trial_full(const TrialSpec& spec) {
  spec.validate();
  RunArtifacts art;
  art.world = make_world(spec.world, spec.seed);

  const std::unique_ptr<WorldModel> learned = planner_model(spec, art.world);
  PlanProblem prob;
  prob.model = learned ? learned.get() : art.world.model.get();
  prob.s0 = art.world.s0;
  prob.goal = art.world.goal;
  prob.horizon = spec.horizon;

  RngStream rng(spec.seed, kPlanStream);
  art.plan = dispatch_planner(spec.planner, prob, rng);

  TrialReport& rep = art.report;
  rep.cell = spec.cell;
  rep.seed = spec.seed;
  rep.iterations = art.plan.iterations_used;
  rep.model_evals = art.plan.model_evals;
  rep.diverged = art.plan.diverged;
  rep.time = static_cast<double>(art.plan.model_evals) * kSecondsPerEval;
  rep.timeout = rep.time > spec.time_limit;
  rep.config_hash = fnv1a_hex(spec.to_json().dump());

  // open-loop execution on the true world, first-passage distance
  double best = std::numeric_limits<double>::infinity();
  try {
    art.executed = rollout(*art.world.model, art.world.s0, art.plan.actions);
    for (const Vec& s : art.executed.states)
      if (all_finite(s)) best = std::min(best, norm2(sub(s, art.world.goal)));
  } catch (const std::exception&) {
    // leave distance infinite; report stays a failure
  }
  if (!std::isfinite(best)) best = std::numeric_limits<double>::max();  // JSON-safe
  rep.final_distance = best;
  rep.success = !rep.timeout && rep.final_distance <= spec.success_radius;
  return art;
}

TrialReport run_trial(const TrialSpec& spec) { return run_trial_full(spec).report; }

json trial_report_to_json(const TrialReport& r) {
  json j;
  j["success"] = r.success;
  j["timeout"] = r.timeout;
  j["diverged"] = r.diverged;
  j["time"] = r.time;
  j["final_distance"] = r.final_distance;
  j["iterations"] = r.iterations;
  j["model_evals"] = r.model_evals;
  j["cell"] = r.cell;
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  return j;
}

}  // namespace liftplan::harness
