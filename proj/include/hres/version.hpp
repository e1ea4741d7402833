#pragma once

namespace hres {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace hres
