#pragma once

namespace diodeopt {
inline constexpr const char* kVersion = "0.1.0";
}
