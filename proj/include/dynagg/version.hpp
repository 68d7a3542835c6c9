#pragma once

namespace dynagg {

inline constexpr const char* tool_name = "dynagg";
inline constexpr const char* tool_version = "0.1.0";

} // namespace dynagg
