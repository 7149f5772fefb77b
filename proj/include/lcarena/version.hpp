#pragma once

namespace lcarena {

inline constexpr const char* kToolVersion = "0.1.0";

}
