#pragma once

namespace fracwell {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fracwell
