#pragma once

namespace restlab {

// Version stamp echoed into every JSON summary so result files can be tied
// back to the code that produced them.
inline constexpr const char* kArtifactVersion = "restlab 1.0.0";

}  // namespace restlab
