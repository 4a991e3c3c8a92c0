#pragma once

namespace sentsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sentsim
