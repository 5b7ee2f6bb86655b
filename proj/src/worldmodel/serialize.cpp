#include "liftplan/model_io.hpp"

namespace liftplan {

using nlohmann::json;

json model_to_json(const WorldModel& m) {
  json j;
  if (const auto* lin = dynamic_cast<const LinearModel*>(&m)) {
    j["type"] = "linear";
    j["dims"] = {{"state", lin->state_dim()}, {"action", lin->action_dim()}};
    Vec flat;
    flat.insert(flat.end(), lin->A().data.begin(), lin->A().data.end());
    flat.insert(flat.end(), lin->B().data.begin(), lin->B().data.end());
    flat.insert(flat.end(), lin->offset().begin(), lin->offset().end());
    j["parameters"] = flat;
    j["metadata"] = json::object();
    return j;
  }
  if (const auto* wall = dynamic_cast<const WallWorld*>(&m)) {
    j["type"] = "wall";
    j["dims"] = {{"state", 2}, {"action", 2}};
    Vec flat;
    for (const auto& w : wall->walls()) {
      flat.push_back(w.x1);
      flat.push_back(w.y1);
      flat.push_back(w.x2);
      flat.push_back(w.y2);
      flat.push_back(w.thickness);
    }
    j["parameters"] = flat;
    j["metadata"] = {{"stiffness", wall->stiffness()},
                     {"step_scale", wall->step_scale()},
                     {"action_limit", wall->action_limit()}};
    return j;
  }
  if (const auto* mlp = dynamic_cast<const MlpModel*>(&m)) {
    j["type"] = "mlp";
    j["dims"] = {{"state", mlp->state_dim()},
                 {"action", mlp->action_dim()},
                 {"widths", mlp->layer_widths()}};
    j["parameters"] = mlp->flatten_parameters();
    j["metadata"] = {{"seed", mlp->training_seed}, {"training_loss", mlp->training_loss}};
    return j;
  }
  throw std::invalid_argument("model_to_json: unknown model type");
}

std::unique_ptr<WorldModel> model_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  const Vec flat = j.at("parameters").get<Vec>();
  if (type == "linear") {
    const std::size_t n = j.at("dims").at("state").get<std::size_t>();
    const std::size_t k = j.at("dims").at("action").get<std::size_t>();
    if (flat.size() != n * n + n * k + n)
      throw std::invalid_argument("model_from_json: linear parameter count mismatch");
    DenseMatrix A(n, n), B(n, k);
    std::copy(flat.begin(), flat.begin() + n * n, A.data.begin());
    std::copy(flat.begin() + n * n, flat.begin() + n * n + n * k, B.data.begin());
    Vec c(flat.begin() + n * n + n * k, flat.end());
    return std::make_unique<LinearModel>(std::move(A), std::move(B), std::move(c));
  }
  if (type == "wall") {
    if (flat.size() % 5 != 0)
      throw std::invalid_argument("model_from_json: wall parameter count mismatch");
    std::vector<WallSegment> walls;
    for (std::size_t i = 0; i < flat.size(); i += 5)
      walls.push_back({flat[i], flat[i + 1], flat[i + 2], flat[i + 3], flat[i + 4]});
    const auto& meta = j.at("metadata");
    return std::make_unique<WallWorld>(
        std::move(walls), meta.at("stiffness").get<double>(),
        meta.at("step_scale").get<double>(),
        meta.contains("action_limit") ? meta.at("action_limit").get<double>() : 0.0);
  }
  if (type == "mlp") {
    const std::size_t n = j.at("dims").at("state").get<std::size_t>();
    const std::size_t k = j.at("dims").at("action").get<std::size_t>();
    const auto widths = j.at("dims").at("widths").get<std::vector<std::size_t>>();
    if (widths.size() < 2 || widths.front() != n + k || widths.back() != n)
      throw std::invalid_argument("model_from_json: mlp widths mismatch");
    std::vector<DenseMatrix> w;
    std::vector<Vec> b;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      w.emplace_back(widths[l + 1], widths[l]);
      b.emplace_back(widths[l + 1], 0.0);
    }
    auto model = std::make_unique<MlpModel>(n, k, std::move(w), std::move(b));
    model->load_parameters(flat);
    const auto& meta = j.at("metadata");
    if (meta.contains("seed")) model->training_seed = meta.at("seed").get<std::uint64_t>();
    if (meta.contains("training_loss")) model->training_loss = meta.at("training_loss").get<double>();
    return model;
  }
  throw std::invalid_argument("model_from_json: unknown type '" + type + "'");
}

}  // namespace liftplan
