#pragma once

namespace mmcs {
inline constexpr const char* kVersion = "0.1.0";
}
