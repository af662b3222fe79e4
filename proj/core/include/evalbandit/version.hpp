#pragma once

namespace evalbandit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace evalbandit
