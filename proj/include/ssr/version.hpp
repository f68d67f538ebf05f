#pragma once

namespace ssr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ssr
