#include <set>

#include "liftplan/harness.hpp"

namespace liftplan::harness {
namespace {

constexpr std::uint64_t kWorldStream = 0x77;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& what) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(what + ": unknown field '" + key + "'");
}

DenseMatrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError(what + ": expected a matrix");
  DenseMatrix m(j.size(), j.at(0).size());
  for (std::size_t i = 0; i < m.rows; ++i) {
    const auto& row = j.at(i);
    if (row.size() != m.cols) throw ConfigError(what + ": ragged matrix");
    for (std::size_t c = 0; c < m.cols; ++c) m(i, c) = row.at(c).get<double>();
  }
  return m;
}

Vec vec_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array");
  return j.get<Vec>();
}

double get_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

}  // namespace

WorldInstance make_world(const json& spec, std::uint64_t seed) {
  if (!spec.is_object() || !spec.contains("type"))
    throw ConfigError("world: missing 'type'");
  const std::string type = spec.at("type").get<std::string>();

  if (type == "linear") {
    reject_unknown(spec, {"type", "A", "B", "c", "s0", "g"}, "world linear");
    DenseMatrix a = matrix_from_json(spec.at("A"), "world linear A");
    DenseMatrix b = matrix_from_json(spec.at("B"), "world linear B");
    Vec c = spec.contains("c") ? vec_from_json(spec.at("c"), "world linear c") : Vec();
    WorldInstance w;
    w.s0 = vec_from_json(spec.at("s0"), "world linear s0");
    w.goal = vec_from_json(spec.at("g"), "world linear g");
    w.model = std::make_unique<LinearModel>(std::move(a), std::move(b), std::move(c));
    if (w.s0.size() != w.model->state_dim() || w.goal.size() != w.model->state_dim())
      throw ConfigError("world linear: boundary state dims mismatch");
    return w;
  }

  if (type == "free2d") {
    reject_unknown(spec, {"type", "step_scale", "action_limit", "s0", "g"},
                   "world free2d");
    WorldInstance w;
    w.s0 = vec_from_json(spec.at("s0"), "world free2d s0");
    w.goal = vec_from_json(spec.at("g"), "world free2d g");
    w.model = std::make_unique<WallWorld>(std::vector<WallSegment>{}, 0.0,
                                          get_or(spec, "step_scale", 0.1),
                                          get_or(spec, "action_limit", 0.0));
    return w;
  }

  if (type == "wall") {
    reject_unknown(spec,
                   {"type", "walls", "stiffness", "step_scale", "action_limit", "s0", "g"},
                   "world wall");
    std::vector<WallSegment> walls;
    for (const auto& row : spec.at("walls")) {
      if (row.size() != 5) throw ConfigError("world wall: each wall is [x1,y1,x2,y2,thickness]");
      walls.push_back({row.at(0).get<double>(), row.at(1).get<double>(),
                       row.at(2).get<double>(), row.at(3).get<double>(),
                       row.at(4).get<double>()});
    }
    WorldInstance w;
    w.s0 = vec_from_json(spec.at("s0"), "world wall s0");
    w.goal = vec_from_json(spec.at("g"), "world wall g");
    w.model = std::make_unique<WallWorld>(std::move(walls), get_or(spec, "stiffness", 4.0),
                                          get_or(spec, "step_scale", 0.1),
                                          get_or(spec, "action_limit", 0.0));
    return w;
  }

  if (type == "wall_gate") {
    reject_unknown(spec,
                   {"type", "wall_x", "y_bottom", "y_top", "thickness", "stiffness",
                    "step_scale", "action_limit", "jitter", "s0", "g"},
                   "world wall_gate");
    const double jitter = get_or(spec, "jitter", 0.0);
    Vec s0 = spec.contains("s0") ? vec_from_json(spec.at("s0"), "wall_gate s0")
                                 : Vec{-0.7, 0.0};
    Vec g = spec.contains("g") ? vec_from_json(spec.at("g"), "wall_gate g") : Vec{0.7, 0.0};
    double y_top = get_or(spec, "y_top", 0.25);
    if (jitter > 0.0) {
      RngStream rng(seed, kWorldStream);
      s0[1] += rng.uniform(-jitter, jitter);
      g[1] += rng.uniform(-jitter, jitter);
      y_top += rng.uniform(-jitter, jitter);
    }
    std::vector<WallSegment> walls = {{get_or(spec, "wall_x", 0.0),
                                       get_or(spec, "y_bottom", -1.6),
                                       get_or(spec, "wall_x", 0.0), y_top,
                                       get_or(spec, "thickness", 0.15)}};
    WorldInstance w;
    w.s0 = std::move(s0);
    w.goal = std::move(g);
    w.model = std::make_unique<WallWorld>(std::move(walls), get_or(spec, "stiffness", 4.0),
                                          get_or(spec, "step_scale", 0.1),
                                          get_or(spec, "action_limit", 1.0));
    return w;
  }

  throw ConfigError("world: unknown type '" + type + "'");
}

}  // namespace liftplan::harness
