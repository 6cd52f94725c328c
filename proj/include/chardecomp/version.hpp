#pragma once

namespace chardecomp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace chardecomp
