#pragma once

namespace grushin {

inline constexpr const char* version = "0.1.0";

} // namespace grushin
