#pragma once

namespace fieldsum {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fieldsum
