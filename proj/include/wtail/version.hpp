#pragma once

namespace wtail {
inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kArtifactName = "wtail";
}  // namespace wtail
