#pragma once

namespace casispec {

inline constexpr const char* version = "0.1.0";

}  // namespace casispec
