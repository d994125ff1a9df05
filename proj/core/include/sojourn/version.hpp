#pragma once

namespace sojourn {

inline constexpr const char* kVersionString = "0.3.0";

}  // namespace sojourn
