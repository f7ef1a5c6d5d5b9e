#pragma once

// Minimal deterministic SVG line charts.

#include <filesystem>
#include <string>
#include <vector>

#include "rotpend/sim.hpp"

namespace rotpend::cli {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// At most this many points per polyline; longer series are decimated by a
/// fixed stride that keeps the last point.
inline constexpr std::size_t kMaxPlotPoints = 2000;

std::string render_svg(const PlotSpec& spec);

/// A trajectory labeled for plotting ("classical", "adaptive", ...).
struct LabeledTrajectory {
  std::string label;
  const Trajectory* traj = nullptr;
};

/// Writes tracking.svg, error.svg, control.svg and theta.svg into dir and
/// returns their paths. Each trajectory contributes one series per plot;
/// tracking.svg also draws y_m from the first one.
std::vector<std::filesystem::path> emit_plots(const std::vector<LabeledTrajectory>& runs,
                                              const std::filesystem::path& dir);

}  // namespace rotpend::cli
