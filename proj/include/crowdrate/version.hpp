#pragma once

namespace crowdrate {
inline constexpr const char* kVersion = "0.1.0";
}
