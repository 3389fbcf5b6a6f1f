#pragma once

namespace declip {

inline constexpr const char* kToolName = "declip";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace declip
