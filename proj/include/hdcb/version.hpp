#pragma once

namespace hdcb {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kManifestSchema = "hdcb.manifest.v1";

}  // namespace hdcb
