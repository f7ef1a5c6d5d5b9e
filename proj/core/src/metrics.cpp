#include <algorithm>
#include <cmath>
#include <limits>

#include "rotpend/errors.hpp"
#include "rotpend/sim.hpp"

namespace rotpend {

namespace {

template <class Pred>
WindowStats stats_where(const Trajectory& traj, Pred in_window) {
  WindowStats w;
  w.min = std::numeric_limits<double>::infinity();
  w.max = -std::numeric_limits<double>::infinity();
  double sum_sq = 0.0;
  for (const auto& s : traj.samples) {
    if (!in_window(s.t)) continue;
    ++w.count;
    w.min = std::min(w.min, s.e);
    w.max = std::max(w.max, s.e);
    w.max_abs = std::max(w.max_abs, std::abs(s.e));
    sum_sq += s.e * s.e;
  }
  if (w.count == 0) {
    throw Error(ErrorKind::kInvalidArgument, "metrics window holds no samples");
  }
  w.rms = std::sqrt(sum_sq / static_cast<double>(w.count));
  return w;
}

}  // namespace

WindowStats window_stats(const Trajectory& traj, double t0, double t1) {
  return stats_where(traj, [=](double t) { return t >= t0 && t < t1; });
}

Metrics compute_metrics(const Trajectory& traj, double settle_threshold) {
  if (traj.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "cannot compute metrics of an empty trajectory");
  }
  const double t_first = traj.samples.front().t;
  const double t_last = traj.samples.back().t;
  const double t_final = t_first + 0.75 * (t_last - t_first);

  const auto all = stats_where(traj, [](double) { return true; });
  const auto fin = stats_where(traj, [=](double t) { return t >= t_final; });

  Metrics m;
  m.steady_band = {fin.min, fin.max};
  m.rms = all.rms;
  m.rms_final = fin.rms;
  m.max_abs = all.max_abs;
  m.max_abs_final = fin.max_abs;

  // Walk back from the end to the last sample at or above the threshold.
  const auto& s = traj.samples;
  std::size_t first_inside = s.size();
  for (std::size_t i = s.size(); i-- > 0;) {
    if (std::abs(s[i].e) >= settle_threshold) break;
    first_inside = i;
  }
  if (first_inside < s.size()) m.settle_time = s[first_inside].t;
  return m;
}

}  // namespace rotpend
