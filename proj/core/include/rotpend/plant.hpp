#pragma once

// Rotational inverted pendulum: physical constants, state-space model and
// the structural identities the controllers rely on.
//
//   ẋ1 = x2
//   ẋ2 = a1·x2 + b1·u
//   ẋ3 = x4
//   ẋ4 = a2·x2 + a3·sin x3 + a4·x4 + b2·u
//
// Output y = x3 (pendulum angle from vertical). Angles are not wrapped.

#include <array>
#include <optional>
#include <string_view>

namespace rotpend {

enum class PhysicalParam { kM1, kK1, kAp, kJ1, kG, kL1, kC1, kKp };

inline constexpr std::array<PhysicalParam, 8> kAllPhysicalParams = {
    PhysicalParam::kM1, PhysicalParam::kK1, PhysicalParam::kAp,
    PhysicalParam::kJ1, PhysicalParam::kG,  PhysicalParam::kL1,
    PhysicalParam::kC1, PhysicalParam::kKp};

/// Config-file spelling: m1, k1, a_p, J1, g, l1, c1, k_p.
std::string_view to_string(PhysicalParam p);
std::optional<PhysicalParam> parse_physical_param(std::string_view name);

struct PhysicalParams {
  double m1 = 8.6184e-2;  // pendulum mass [kg]
  double k1 = 1.9e-3;     // motor torque constant
  double a_p = 33.04;     // motor pole [1/s]
  double J1 = 1.031e-3;   // pendulum inertia [kg m^2]
  double g = 9.8066;      // gravity [m/s^2]
  double l1 = 0.113;      // pendulum length [m]
  double c1 = 2.979e-3;   // viscous friction
  double k_p = 74.89;     // motor gain

  double get(PhysicalParam p) const;
  void set(PhysicalParam p, double value);

  /// Full invariant check: J1 > 0, m1 > 0, l1 > 0, k_p ≠ 0, k1 ≠ 0, all
  /// finite. Throws Error(kInvalidPhysics).
  void validate() const;

  bool operator==(const PhysicalParams&) const = default;
};

struct StateSpaceCoeffs {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double a4 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;

  bool operator==(const StateSpaceCoeffs&) const = default;
};

struct StateVector {
  double x1 = 0.0;  // base angle [rad]
  double x2 = 0.0;  // base rate [rad/s]
  double x3 = 0.0;  // pendulum angle [rad]
  double x4 = 0.0;  // pendulum rate [rad/s]

  bool all_finite() const;
  double max_abs() const;

  bool operator==(const StateVector&) const = default;
};

/// Throws Error(kInvalidPhysics) when J1 ≤ 0, k1 = 0 or k_p = 0, i.e. when a
/// coefficient would be undefined or b2 would vanish.
StateSpaceCoeffs derive_coefficients(const PhysicalParams& p);

StateVector plant_derivative(const StateSpaceCoeffs& c, const StateVector& x,
                             double u);

/// Drift term of the output's second derivative: ÿ = f(x) + g·u.
double true_f(const StateSpaceCoeffs& c, const StateVector& x);
double true_g(const StateSpaceCoeffs& c);

/// a1 − a2·b1/b2. Vanishes for any coefficients produced by
/// derive_coefficients, which leaves the zero dynamics as a double
/// integrator. Throws Error(kInvalidArgument) when b2 = 0.
double zero_dynamics_residual(const StateSpaceCoeffs& c);

/// (curr − prev)/dt. Throws Error(kInvalidArgument) for dt ≤ 0.
double backward_difference_estimate(double prev, double curr, double dt);

}  // namespace rotpend
