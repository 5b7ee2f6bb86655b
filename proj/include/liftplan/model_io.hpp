#pragma once

#include <memory>

#include <json.hpp>

#include "liftplan/worldmodel.hpp"

namespace liftplan {

// JSON document {type, dims, parameters (flat, row-major), metadata}.
// Round-trips are bit-exact for the flat parameter array.
nlohmann::json model_to_json(const WorldModel& m);
std::unique_ptr<WorldModel> model_from_json(const nlohmann::json& j);

}  // namespace liftplan
