#pragma once

namespace sketchgait {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sketchgait
