#pragma once

namespace scalekernel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace scalekernel
