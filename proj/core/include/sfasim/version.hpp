#pragma once

namespace sfasim {

inline constexpr const char* version = "0.3.0";

}  // namespace sfasim
