#pragma once

namespace voltra {

inline constexpr const char* tool_name = "voltra";
inline constexpr const char* tool_version = "0.1.0";

}  // namespace voltra
