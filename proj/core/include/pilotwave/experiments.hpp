#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pilotwave/config.hpp"

namespace pilotwave {

/// One threshold gate evaluated by a run.
struct Check {
  std::string name;
  /// Numbered acceptance criterion the gate belongs to (0: none).
  int criterion = 0;
  double value = 0.0;
  double threshold = 0.0;
  /// "<", "<=", ">", ">=" or "in" (threshold..upper).
  std::string relation = "<";
  double upper = 0.0;
  bool passed = false;
  std::string detail;
};

struct RunArtifacts {
  ExperimentConfig config;
  std::vector<std::filesystem::path> files;
  std::vector<Check> checks;
  /// Resolved config, code version, wall time and check outcomes as JSON.
  std::string metadata;
  double wall_seconds = 0.0;
  bool passed() const noexcept;
};

std::string code_version();

/// Runs the configured experiment. Files go to out_dir when it is non-empty
/// (created if missing); the metadata file is run.json. Numerical errors are
/// rethrown with the experiment name prepended.
RunArtifacts run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pilotwave
