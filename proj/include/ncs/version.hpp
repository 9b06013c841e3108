#pragma once

namespace ncs {

inline constexpr const char* kToolName = "ncs";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace ncs
