#pragma once

namespace infoscape {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace infoscape
