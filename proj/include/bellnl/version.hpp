#pragma once

namespace bellnl {

inline constexpr const char* kToolName = "bellnl";
inline constexpr const char* kVersion = "0.1.0";

} // namespace bellnl
