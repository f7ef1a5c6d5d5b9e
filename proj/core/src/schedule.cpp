#include <algorithm>
#include <cmath>
#include <numbers>

#include "rotpend/errors.hpp"
#include "rotpend/sim.hpp"

namespace rotpend {

std::string_view to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::kStep: return "step";
    case ScheduleKind::kRamp: return "ramp";
    case ScheduleKind::kSine: return "sine";
  }
  return "?";
}

std::string_view to_string(ControllerType t) {
  return t == ControllerType::kClassical ? "classical" : "adaptive";
}

std::string_view to_string(MeasurementMode m) {
  return m == MeasurementMode::kTrueState ? "true-state" : "backward-difference";
}

double ScheduleEvent::multiplier(double t) const {
  if (t < start) return 1.0;
  switch (kind) {
    case ScheduleKind::kStep:
      return magnitude;
    case ScheduleKind::kRamp:
      if (t >= end) return magnitude;
      return 1.0 + (magnitude - 1.0) * (t - start) / (end - start);
    case ScheduleKind::kSine:
      return 1.0 + magnitude * std::sin(2.0 * std::numbers::pi * (t - start) / period);
  }
  return 1.0;
}

double ParameterSchedule::multiplier(PhysicalParam p, double t) const {
  double m = 1.0;
  for (const auto& ev : events) {
    if (ev.target == p) m *= ev.multiplier(t);
  }
  return m;
}

std::array<double, 8> ParameterSchedule::multipliers(double t) const {
  std::array<double, 8> out{};
  for (std::size_t i = 0; i < kAllPhysicalParams.size(); ++i) {
    out[i] = multiplier(kAllPhysicalParams[i], t);
  }
  return out;
}

void ParameterSchedule::validate() const {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    const std::string where = "schedule event " + std::to_string(i + 1) + ": ";
    auto fail = [&](const char* what) {
      throw Error(ErrorKind::kScenarioInvalid, where + what);
    };
    if (!std::isfinite(ev.start) || ev.start < 0.0) fail("start time must be >= 0");
    if (!std::isfinite(ev.magnitude)) fail("magnitude must be finite");
    if (ev.kind == ScheduleKind::kRamp && !(ev.end > ev.start && std::isfinite(ev.end))) {
      fail("ramp end must be after its start");
    }
    if (ev.kind == ScheduleKind::kSine && !(ev.period > 0.0 && std::isfinite(ev.period))) {
      fail("sine period must be positive");
    }

    // Range of this event's multiplier over all t.
    double lo = std::min(1.0, ev.magnitude);
    double hi = std::max(1.0, ev.magnitude);
    if (ev.kind == ScheduleKind::kSine) {
      lo = 1.0 - std::abs(ev.magnitude);
      hi = 1.0 + std::abs(ev.magnitude);
    }
    switch (ev.target) {
      case PhysicalParam::kM1:
      case PhysicalParam::kJ1:
      case PhysicalParam::kL1:
        if (lo <= 0.0) {
          throw Error(ErrorKind::kScenarioInvalid,
                      where + "multiplier would drive " +
                          std::string(to_string(ev.target)) + " to a non-positive value");
        }
        break;
      case PhysicalParam::kK1:
      case PhysicalParam::kKp:
        if (lo <= 0.0 && hi >= 0.0) {
          throw Error(ErrorKind::kScenarioInvalid,
                      where + "multiplier would drive " +
                          std::string(to_string(ev.target)) + " through zero");
        }
        break;
      default:
        break;
    }
  }
}

PhysicalParams apply_schedule(const PhysicalParams& base,
                              const ParameterSchedule& sched, double t) {
  PhysicalParams p = base;
  for (PhysicalParam which : kAllPhysicalParams) {
    const double m = sched.multiplier(which, t);
    if (m != 1.0) p.set(which, base.get(which) * m);
  }
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kScenarioInvalid,
                "schedule at t = " + std::to_string(t) + ": " + e.what());
  }
  return p;
}

ParameterSchedule default_uncertainty_schedule() {
  ParameterSchedule s;
  s.events.push_back({PhysicalParam::kM1, ScheduleKind::kStep, 10.0, 1.3});
  s.events.push_back({PhysicalParam::kC1, ScheduleKind::kStep, 10.0, 1.5});
  return s;
}

std::vector<Partition> FuzzyConfig::partitions() const {
  std::vector<Partition> parts;
  parts.reserve(axes.size());
  for (const auto& a : axes) parts.push_back(Partition::uniform(a.lo, a.hi, a.centers));
  return parts;
}

std::size_t ScenarioConfig::sample_count() const {
  // Guard against t_end/dt landing a hair below an integer.
  return static_cast<std::size_t>(std::floor(t_end / dt + 1e-9)) + 1;
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::kConfigSemantic, what);
  };
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("sim.dt must be positive");
  if (!(t_end > dt) || !std::isfinite(t_end)) fail("sim.t_end must exceed sim.dt");
  if (!(settle_threshold > 0.0)) fail("sim.settle_threshold must be positive");
  if (!x0.all_finite()) fail("sim.x0 must be finite");
  if (!std::isfinite(reference.amplitude)) fail("reference.amplitude must be finite");
  if (!std::isfinite(reference.frequency)) fail("reference.frequency must be finite");
  fl.validate();
  adaptive.validate();

  const char* axis_names[] = {"x2", "x3", "x4"};
  for (std::size_t i = 0; i < fuzzy.axes.size(); ++i) {
    const auto& a = fuzzy.axes[i];
    if (a.centers < 2) {
      fail(std::string("controller.centers: axis ") + axis_names[i] + " needs at least 2");
    }
    if (!(a.hi > a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi)) {
      fail(std::string("controller.") + axis_names[i] + "_range needs lo < hi");
    }
  }

  try {
    plant.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kScenarioInvalid, std::string("plant: ") + e.what());
  }
  schedule.validate();
}

}  // namespace rotpend
