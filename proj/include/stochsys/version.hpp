#pragma once

namespace stochsys {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stochsys
