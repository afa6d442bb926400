#pragma once

namespace pb {
inline constexpr const char* kVersion = "0.1.0";
}
