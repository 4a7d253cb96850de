#pragma once

namespace coopmac {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace coopmac
