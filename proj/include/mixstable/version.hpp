#pragma once

namespace mixstable {
inline constexpr const char* kVersion = "0.1.0";
}
