#pragma once

namespace heatwave {

inline constexpr const char* kToolName = "heatwave";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace heatwave
