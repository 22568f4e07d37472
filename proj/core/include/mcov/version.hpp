#pragma once

namespace mcov {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mcov
