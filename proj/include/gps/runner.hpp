#pragma once

#include <string>

#include "gps/config.hpp"

namespace gps {

inline constexpr const char* kToolkitVersion = "0.1.0";

// exit codes shared by the runner and the CLI
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitInconclusive = 4;
inline constexpr int kExitIo = 5;

enum class ArtifactFormat { csv, json };

// Execute the experiment and write its artifacts (tables + manifest.json)
// under out_dir. Buffered writing: on I/O failure nothing of this run is left
// behind. A manifest with a different config hash in out_dir is refused.
int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                   ArtifactFormat format = ArtifactFormat::csv);

}  // namespace gps
