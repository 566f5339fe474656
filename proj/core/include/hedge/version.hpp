#pragma once

namespace hedge {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace hedge
