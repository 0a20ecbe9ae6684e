#pragma once

namespace coremantle {

inline constexpr const char* kVersion = "0.1.0";

} // namespace coremantle
