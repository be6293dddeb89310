#pragma once

namespace cicmb {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cicmb
