#pragma once

namespace tropc {

inline constexpr const char* kVersion = "0.1.0";

}
