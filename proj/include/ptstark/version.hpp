#pragma once

namespace ptstark {

inline constexpr const char* version() { return "1.0.0"; }

}  // namespace ptstark
