#include "rotpend/cli/run.hpp"

#include <fstream>
#include <future>
#include <iterator>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "rotpend/cli/config.hpp"
#include "rotpend/cli/csv.hpp"
#include "rotpend/cli/plot.hpp"

namespace rotpend::cli {

namespace {

void append_metrics(fmt::memory_buffer& b, const ControllerReport& r) {
  auto out = std::back_inserter(b);
  const auto& m = r.metrics;
  fmt::format_to(out, "[{}]\n", to_string(r.controller));
  fmt::format_to(out, "status = {}\n", r.divergence ? "diverged" : "completed");
  if (r.divergence) fmt::format_to(out, "divergence = {}\n", r.divergence->what());
  fmt::format_to(out, "rms = {:.6g}\n", m.rms);
  fmt::format_to(out, "max_abs = {:.6g}\n", m.max_abs);
  fmt::format_to(out, "final_window_rms = {:.6g}\n", m.rms_final);
  fmt::format_to(out, "final_window_max_abs = {:.6g}\n", m.max_abs_final);
  fmt::format_to(out, "final_window_band = [{:.6g}, {:.6g}]\n", m.steady_band.min,
                 m.steady_band.max);
  if (m.settle_time) {
    fmt::format_to(out, "settle_time = {:.6g}\n", *m.settle_time);
  } else {
    fmt::format_to(out, "settle_time = none\n");
  }
  if (!r.K.empty()) {
    fmt::format_to(out, "K = {}\n", fmt::join(r.K, ", "));
    for (Eigen::Index i = 0; i < r.P.rows(); ++i) {
      std::vector<double> row(r.P.row(i).begin(), r.P.row(i).end());
      fmt::format_to(out, "P[{}] = {}\n", i, fmt::join(row, ", "));
    }
  }
  for (const auto& w : r.warnings) fmt::format_to(out, "warning = {}\n", w);
}

ControllerReport summarize(const SimulationResult& res, const ScenarioConfig& cfg) {
  ControllerReport r;
  r.controller = res.controller;
  r.metrics = compute_metrics(res.trajectory, cfg.settle_threshold);
  r.divergence = res.divergence;
  r.warnings = res.warnings;
  if (res.controller == ControllerType::kAdaptive) {
    r.K = cfg.adaptive.K;
    r.P = res.P;
  }
  return r;
}

}  // namespace

bool RunReport::diverged() const {
  for (const auto& c : controllers) {
    if (c.divergence) return true;
  }
  return false;
}

std::string RunReport::summary() const {
  fmt::memory_buffer b;
  auto out = std::back_inserter(b);
  fmt::format_to(out, "# scenario\n");
  for (std::string_view text = to_config_text(config); !text.empty();) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    if (line.empty()) {
      fmt::format_to(out, "#\n");
    } else {
      fmt::format_to(out, "#   {}\n", line);
    }
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
  }
  for (const auto& c : controllers) {
    fmt::format_to(out, "\n");
    append_metrics(b, c);
  }
  if (!verdicts.empty()) {
    fmt::format_to(out, "\n[verdicts]\n");
    for (const auto& v : verdicts) fmt::format_to(out, "{}\n", v);
  }
  return fmt::to_string(b);
}

RunReport run_command(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorKind::kIo,
                fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));
  }

  RunReport report;
  report.config = cfg;

  std::vector<SimulationResult> results;
  if (cfg.compare) {
    ScenarioConfig classical = cfg;
    classical.controller = ControllerType::kClassical;
    ScenarioConfig adaptive = cfg;
    adaptive.controller = ControllerType::kAdaptive;
    auto a = std::async(std::launch::async, [&adaptive] { return run_simulation(adaptive); });
    SimulationResult c = run_simulation(classical);
    results.push_back(std::move(c));
    results.push_back(a.get());
  } else {
    results.push_back(run_simulation(cfg));
  }

  for (const auto& r : results) report.controllers.push_back(summarize(r, cfg));

  if (cfg.compare) {
    const auto& c = report.controllers[0];
    const auto& a = report.controllers[1];
    const bool both = !c.divergence && !a.divergence;
    report.verdicts.push_back(
        fmt::format("adaptive final-window RMS < classical: {}",
                    both && a.metrics.rms_final < c.metrics.rms_final ? "yes" : "no"));
    report.verdicts.push_back(
        fmt::format("adaptive final-window max |e| < classical: {}",
                    both && a.metrics.max_abs_final < c.metrics.max_abs_final ? "yes" : "no"));
  }

  // All simulation work is done; write files one after another.
  std::vector<LabeledTrajectory> runs;
  for (const auto& r : results) {
    const std::string label(to_string(r.controller));
    const auto name =
        cfg.compare ? "trajectory_" + label + ".csv" : std::string("trajectory.csv");
    write_trajectory_csv((out_dir / name).string(), r.trajectory);
    report.files.push_back(out_dir / name);
    runs.push_back({label, &r.trajectory});
  }
  for (auto& p : emit_plots(runs, out_dir)) report.files.push_back(std::move(p));

  const auto metrics_path = out_dir / "metrics.txt";
  report.files.push_back(metrics_path);
  std::ofstream out(metrics_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", metrics_path.string()));
  out << report.summary();
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, fmt::format("write to '{}' failed", metrics_path.string()));
  return report;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfigSyntax: return 3;
    case ErrorKind::kConfigSemantic: return 4;
    case ErrorKind::kScenarioInvalid: return 5;
    case ErrorKind::kInvalidPhysics: return 6;
    case ErrorKind::kNotHurwitz: return 7;
    case ErrorKind::kNumericalFailure: return 8;
    case ErrorKind::kDivergence: return 9;
    case ErrorKind::kIo: return 10;
    case ErrorKind::kInvalidArgument: return 11;
  }
  return 1;
}

}  // namespace rotpend::cli
