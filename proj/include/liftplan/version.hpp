#pragma once

namespace liftplan {

// Embedded in every report; bump on any change that affects report content.
inline constexpr const char* kToolkitVersion = "liftplan 0.1.0";

}  // namespace liftplan
