#pragma once

namespace evy {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace evy
