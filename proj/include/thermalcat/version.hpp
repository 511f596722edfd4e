#pragma once

namespace thermalcat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace thermalcat
