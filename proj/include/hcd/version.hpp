#pragma once

namespace hcd {

inline constexpr const char* kToolName = "hcdtool";
inline constexpr const char* kToolVersion = "0.1.0";

// Bumped whenever any emitted JSON/CSV schema changes.
inline constexpr int kSchemaVersion = 1;

// Bumped whenever the model file layout changes.
inline constexpr int kModelFormatVersion = 1;

}  // namespace hcd
