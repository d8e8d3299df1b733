#pragma once

namespace ttslat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ttslat
