#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "rotpend/control.hpp"
#include "rotpend/errors.hpp"
#include "rotpend/fuzzy.hpp"
#include "rotpend/plant.hpp"

namespace rotpend {

// ---------------------------------------------------------------------------
// Time-varying parameters

enum class ScheduleKind {
  kStep,  // multiplier = magnitude for t ≥ start
  kRamp,  // 1 → magnitude linearly over [start, end], held afterwards
  kSine,  // 1 + magnitude·sin(2π(t − start)/period) for t ≥ start
};

std::string_view to_string(ScheduleKind k);

struct ScheduleEvent {
  PhysicalParam target = PhysicalParam::kM1;
  ScheduleKind kind = ScheduleKind::kStep;
  double start = 0.0;
  double magnitude = 1.0;
  double end = 0.0;     // ramp only
  double period = 1.0;  // sine only

  double multiplier(double t) const;
  bool operator==(const ScheduleEvent&) const = default;
};

struct ParameterSchedule {
  std::vector<ScheduleEvent> events;

  /// Product of all active multipliers on p at time t.
  double multiplier(PhysicalParam p, double t) const;
  std::array<double, 8> multipliers(double t) const;

  /// Event shape checks (times ≥ 0, ramp end > start, period > 0). Throws
  /// Error(kScenarioInvalid).
  void validate() const;

  bool operator==(const ParameterSchedule&) const = default;
};

/// Throws Error(kScenarioInvalid) if a multiplier pushes a parameter out of
/// its invariant.
PhysicalParams apply_schedule(const PhysicalParams& base,
                              const ParameterSchedule& sched, double t);

/// m1 ×1.3 and c1 ×1.5, both stepping at t = 10 s.
ParameterSchedule default_uncertainty_schedule();

// ---------------------------------------------------------------------------
// Scenario

enum class ControllerType { kClassical, kAdaptive };
enum class MeasurementMode {
  kTrueState,
  /// x2 and x4 estimated from backward differences of sampled x1, x3.
  kBackwardDifference,
};

std::string_view to_string(ControllerType t);
std::string_view to_string(MeasurementMode m);

struct AxisConfig {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t centers = 5;

  bool operator==(const AxisConfig&) const = default;
};

/// Input partitions for (x2, x3, x4); f̂ and ĝ share them.
struct FuzzyConfig {
  // x2 spans ±25 rad/s: with y_m = A·sin t the zero dynamics swing the base
  // rate over roughly [−20, 0] rad/s at A = 0.2.
  std::array<AxisConfig, 3> axes = {
      AxisConfig{-25.0, 25.0, 5},
      AxisConfig{-std::numbers::pi / 3.0, std::numbers::pi / 3.0, 5},
      AxisConfig{-6.0, 6.0, 5}};

  std::vector<Partition> partitions() const;
  bool operator==(const FuzzyConfig&) const = default;
};

struct ScenarioConfig {
  ControllerType controller = ControllerType::kClassical;
  std::string preset = "stable";
  FLControllerConfig fl;
  AdaptiveControllerConfig adaptive = AdaptiveControllerConfig::stable();
  FuzzyConfig fuzzy;
  ReferenceSignal reference;
  PhysicalParams plant;
  StateVector x0;
  double dt = 1e-3;
  double t_end = 20.0;
  ParameterSchedule schedule;
  MeasurementMode measurement = MeasurementMode::kBackwardDifference;
  std::uint64_t seed = 0;
  bool compare = false;
  double settle_threshold = 0.01;

  /// Throws Error(kConfigSemantic) or Error(kScenarioInvalid).
  void validate() const;

  std::size_t sample_count() const;

  bool operator==(const ScenarioConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Trajectory

struct Sample {
  double t = 0.0;
  StateVector x;
  double u = 0.0;
  double ym = 0.0;
  double e = 0.0;  // y_m − y
  double theta_f_norm = 0.0;
  double theta_g_norm = 0.0;
  bool clamp = false;
  std::array<double, 8> multipliers{1, 1, 1, 1, 1, 1, 1, 1};

  bool operator==(const Sample&) const = default;
};

struct Trajectory {
  std::vector<Sample> samples;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  bool operator==(const Trajectory&) const = default;
};

struct SimulationResult {
  ControllerType controller = ControllerType::kClassical;
  Trajectory trajectory;
  /// Set when the run aborted; the trajectory holds the samples up to the
  /// last finite state.
  std::optional<DivergenceError> divergence;
  std::vector<std::string> warnings;
  /// Final adaptive parameters (empty for the classical controller).
  Eigen::VectorXd theta_f;
  Eigen::VectorXd theta_g;
  /// Lyapunov matrix the adaptation law used (empty for classical).
  Eigen::MatrixXd P;

  bool completed() const { return !divergence.has_value(); }
};

// ---------------------------------------------------------------------------
// Integration

namespace detail {
[[noreturn]] void throw_nonfinite_stage(double t, int stage);
}

/// One classical Runge–Kutta step of ṡ = field(t, s). Throws DivergenceError
/// if any stage derivative is not finite.
template <class Field>
Eigen::VectorXd rk4_step(Field&& field, const Eigen::VectorXd& s, double t,
                         double dt) {
  const Eigen::VectorXd k1 = field(t, s);
  if (!k1.allFinite()) detail::throw_nonfinite_stage(t, 1);
  const Eigen::VectorXd k2 = field(t + 0.5 * dt, s + (0.5 * dt) * k1);
  if (!k2.allFinite()) detail::throw_nonfinite_stage(t, 2);
  const Eigen::VectorXd k3 = field(t + 0.5 * dt, s + (0.5 * dt) * k2);
  if (!k3.allFinite()) detail::throw_nonfinite_stage(t, 3);
  const Eigen::VectorXd k4 = field(t + dt, s + dt * k3);
  if (!k4.allFinite()) detail::throw_nonfinite_stage(t, 4);
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// States with |x| above this abort the run.
inline constexpr double kDivergenceThreshold = 1e6;

/// Closed-loop simulation on the fixed grid t_k = k·dt, k = 0 … ⌊t_end/dt⌋.
///
/// Plant states, any error integrators and both θ vectors form one
/// augmented ODE integrated by rk4_step. In backward-difference mode the
/// rate estimates are refreshed at each grid point and held over the step.
///
/// Throws for invalid scenarios and for a non-Hurwitz A in solved mode;
/// divergence is reported through SimulationResult::divergence.
SimulationResult run_simulation(const ScenarioConfig& cfg);

// ---------------------------------------------------------------------------
// Metrics

struct ErrorBand {
  double min = 0.0;
  double max = 0.0;
};

struct Metrics {
  ErrorBand steady_band;  // final 25 % of the run
  double rms = 0.0;
  double rms_final = 0.0;
  double max_abs = 0.0;
  double max_abs_final = 0.0;
  /// Earliest t after which |e| stays below the threshold; nullopt if the
  /// last sample is still above it.
  std::optional<double> settle_time;
};

struct WindowStats {
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double rms = 0.0;
  double max_abs = 0.0;
};

/// Throws Error(kInvalidArgument) on an empty trajectory.
Metrics compute_metrics(const Trajectory& traj, double settle_threshold = 0.01);

/// Error statistics over samples with t0 ≤ t < t1. Throws
/// Error(kInvalidArgument) if the window holds no samples.
WindowStats window_stats(const Trajectory& traj, double t0, double t1);

}  // namespace rotpend
