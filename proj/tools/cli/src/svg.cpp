#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include <fmt/format.h>

#include "rotpend/cli/plot.hpp"
#include "rotpend/errors.hpp"

namespace rotpend::cli {

namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 400;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  // Degenerate ranges (a constant series) get a unit pad so the line sits
  // in the middle of the frame.
  Range padded(double frac) const {
    if (!(hi >= lo)) return {-1.0, 1.0};
    const double span = hi - lo;
    if (span <= 1e-12 * std::max(1.0, std::abs(lo))) return {lo - 1.0, hi + 1.0};
    return {lo - frac * span, hi + frac * span};
  }
};

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  Range xr;
  Range yr;
  for (const auto& s : spec.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr = xr.padded(0.0);
  yr = yr.padded(0.05);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  fmt::memory_buffer b;
  auto out = std::back_inserter(b);
  fmt::format_to(out,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
                 "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n",
                 kWidth, kHeight);
  fmt::format_to(out, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  fmt::format_to(out, "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                 kWidth / 2, escape(spec.title));

  // Grid and tick labels.
  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / kTicks;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / kTicks;
    fmt::format_to(out,
                   "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>\n"
                   "<text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">{4:.3g}</text>\n",
                   px(fx), kTop, kTop + ph, kTop + ph + 16, fx);
    fmt::format_to(out,
                   "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>\n"
                   "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.3g}</text>\n",
                   kLeft, py(fy), kLeft + pw, kLeft - 6, py(fy) + 4, fy);
  }
  fmt::format_to(out,
                 "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
                 "stroke=\"black\"/>\n",
                 kLeft, kTop, pw, ph);
  fmt::format_to(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                 kLeft + pw / 2, kHeight - 10, escape(spec.x_label));
  fmt::format_to(out,
                 "<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" "
                 "transform=\"rotate(-90 16 {0})\">{1}</text>\n",
                 kTop + ph / 2, escape(spec.y_label));

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = n > kMaxPlotPoints ? (n + kMaxPlotPoints - 1) / kMaxPlotPoints : 1;
    fmt::format_to(out, "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"",
                   escape(s.color));
    bool first = true;
    for (std::size_t i = 0; i < n; i += stride) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      fmt::format_to(out, "{}{:.2f},{:.2f}", first ? "" : " ", px(s.x[i]), py(s.y[i]));
      first = false;
    }
    if (n > 0 && (n - 1) % stride != 0 && std::isfinite(s.y[n - 1])) {
      fmt::format_to(out, " {:.2f},{:.2f}", px(s.x[n - 1]), py(s.y[n - 1]));
    }
    fmt::format_to(out, "\"/>\n");

    const double ly = kTop + 14 + 16 * static_cast<double>(k);
    const double lx = kLeft + pw - 140;
    fmt::format_to(out,
                   "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" "
                   "stroke-width=\"2\"/>\n"
                   "<text x=\"{4}\" y=\"{5}\">{6}</text>\n",
                   lx, ly, lx + 20, escape(s.color), lx + 26, ly + 4, escape(s.label));
  }
  fmt::format_to(out, "</svg>\n");
  return fmt::to_string(b);
}

std::vector<std::filesystem::path> emit_plots(const std::vector<LabeledTrajectory>& runs,
                                              const std::filesystem::path& dir) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"};
  auto column = [](const Trajectory& t, auto get) {
    std::vector<double> v;
    v.reserve(t.size());
    for (const auto& s : t.samples) v.push_back(get(s));
    return v;
  };

  PlotSpec tracking{"Pendulum angle tracking", "t [s]", "angle [rad]", {}};
  PlotSpec error{"Tracking error", "t [s]", "e = ym - y [rad]", {}};
  PlotSpec control{"Control effort", "t [s]", "u", {}};
  PlotSpec theta{"Adaptive parameter norms", "t [s]", "max |theta|", {}};

  const bool many = runs.size() > 1;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Trajectory& tr = *runs[i].traj;
    const auto t = column(tr, [](const Sample& s) { return s.t; });
    const std::string color = palette[(2 * i) % 4];
    const std::string suffix = many ? " (" + runs[i].label + ")" : "";
    if (i == 0) {
      tracking.series.push_back(
          {"ym", "#555555", t, column(tr, [](const Sample& s) { return s.ym; })});
    }
    tracking.series.push_back(
        {"y" + suffix, color, t, column(tr, [](const Sample& s) { return s.x.x3; })});
    error.series.push_back(
        {"e" + suffix, color, t, column(tr, [](const Sample& s) { return s.e; })});
    control.series.push_back(
        {"u" + suffix, color, t, column(tr, [](const Sample& s) { return s.u; })});
    theta.series.push_back({"theta_f" + suffix, color, t,
                            column(tr, [](const Sample& s) { return s.theta_f_norm; })});
    theta.series.push_back({"theta_g" + suffix, palette[(2 * i + 1) % 4], t,
                            column(tr, [](const Sample& s) { return s.theta_g_norm; })});
  }

  std::vector<std::filesystem::path> paths;
  const std::pair<const char*, const PlotSpec*> files[] = {
      {"tracking.svg", &tracking},
      {"error.svg", &error},
      {"control.svg", &control},
      {"theta.svg", &theta}};
  for (const auto& [name, spec] : files) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", path.string()));
    out << render_svg(*spec);
    out.flush();
    if (!out) throw Error(ErrorKind::kIo, fmt::format("write to '{}' failed", path.string()));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace rotpend::cli
