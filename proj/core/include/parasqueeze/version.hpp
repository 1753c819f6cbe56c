#pragma once

namespace parasqueeze {

inline constexpr const char* kVersion = "0.1.0";

// Bumped whenever a CSV column layout changes.
inline constexpr int kCsvSchemaVersion = 1;

}  // namespace parasqueeze
