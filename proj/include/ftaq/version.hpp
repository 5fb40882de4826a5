#pragma once

namespace ftaq {

inline constexpr const char* tool_name = "ftaq";
inline constexpr const char* tool_version = "0.1.0";

}  // namespace ftaq
