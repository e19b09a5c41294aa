#pragma once

namespace mrw {

inline constexpr const char* kVersion = "0.1.0";

}
