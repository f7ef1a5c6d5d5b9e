#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rotpend/errors.hpp"
#include "rotpend/sim.hpp"

namespace rotpend::cli {

struct ControllerReport {
  ControllerType controller = ControllerType::kClassical;
  Metrics metrics;
  std::optional<DivergenceError> divergence;
  std::vector<std::string> warnings;
  /// K and P actually used (adaptive only).
  std::vector<double> K;
  Eigen::MatrixXd P;
};

struct RunReport {
  ScenarioConfig config;
  std::vector<ControllerReport> controllers;
  /// e.g. "adaptive final-window RMS < classical: yes".
  std::vector<std::string> verdicts;
  std::vector<std::filesystem::path> files;

  bool diverged() const;
  /// Text written to metrics.txt.
  std::string summary() const;
};

/// Runs the scenario, or both controllers when cfg.compare is set (in
/// parallel), then writes trajectory CSV(s), metrics.txt and four plots to
/// out_dir, creating it if needed. A divergent run still writes its partial
/// trajectory; check RunReport::diverged(). Setup failures (non-Hurwitz A,
/// invalid scenario) and I/O failures throw.
RunReport run_command(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSelftestFailed = 12;
int exit_code(ErrorKind kind);

}  // namespace rotpend::cli
