#include "rotpend/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rotpend/errors.hpp"

namespace rotpend {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidPhysics: return "invalid physics";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kConfigSyntax: return "config syntax error";
    case ErrorKind::kConfigSemantic: return "config error";
    case ErrorKind::kScenarioInvalid: return "scenario invalid";
    case ErrorKind::kNotHurwitz: return "not Hurwitz";
    case ErrorKind::kNumericalFailure: return "numerical failure";
    case ErrorKind::kDivergence: return "simulation diverged";
    case ErrorKind::kIo: return "I/O error";
  }
  return "error";
}

std::string_view to_string(PhysicalParam p) {
  switch (p) {
    case PhysicalParam::kM1: return "m1";
    case PhysicalParam::kK1: return "k1";
    case PhysicalParam::kAp: return "a_p";
    case PhysicalParam::kJ1: return "J1";
    case PhysicalParam::kG: return "g";
    case PhysicalParam::kL1: return "l1";
    case PhysicalParam::kC1: return "c1";
    case PhysicalParam::kKp: return "k_p";
  }
  return "?";
}

std::optional<PhysicalParam> parse_physical_param(std::string_view name) {
  for (PhysicalParam p : kAllPhysicalParams) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

double PhysicalParams::get(PhysicalParam p) const {
  switch (p) {
    case PhysicalParam::kM1: return m1;
    case PhysicalParam::kK1: return k1;
    case PhysicalParam::kAp: return a_p;
    case PhysicalParam::kJ1: return J1;
    case PhysicalParam::kG: return g;
    case PhysicalParam::kL1: return l1;
    case PhysicalParam::kC1: return c1;
    case PhysicalParam::kKp: return k_p;
  }
  return 0.0;
}

void PhysicalParams::set(PhysicalParam p, double value) {
  switch (p) {
    case PhysicalParam::kM1: m1 = value; break;
    case PhysicalParam::kK1: k1 = value; break;
    case PhysicalParam::kAp: a_p = value; break;
    case PhysicalParam::kJ1: J1 = value; break;
    case PhysicalParam::kG: g = value; break;
    case PhysicalParam::kL1: l1 = value; break;
    case PhysicalParam::kC1: c1 = value; break;
    case PhysicalParam::kKp: k_p = value; break;
  }
}

void PhysicalParams::validate() const {
  for (PhysicalParam p : kAllPhysicalParams) {
    if (!std::isfinite(get(p))) {
      throw Error(ErrorKind::kInvalidPhysics,
                  std::string(to_string(p)) + " is not finite");
    }
  }
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::kInvalidPhysics, what);
  };
  require(J1 > 0.0, "J1 must be positive");
  require(m1 > 0.0, "m1 must be positive");
  require(l1 > 0.0, "l1 must be positive");
  require(k_p != 0.0, "k_p must be nonzero");
  require(k1 != 0.0, "k1 must be nonzero");
}

bool StateVector::all_finite() const {
  return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(x3) &&
         std::isfinite(x4);
}

double StateVector::max_abs() const {
  return std::max({std::abs(x1), std::abs(x2), std::abs(x3), std::abs(x4)});
}

StateSpaceCoeffs derive_coefficients(const PhysicalParams& p) {
  if (!(p.J1 > 0.0)) throw Error(ErrorKind::kInvalidPhysics, "J1 must be positive");
  if (p.k1 == 0.0) throw Error(ErrorKind::kInvalidPhysics, "k1 must be nonzero");
  if (p.k_p == 0.0) throw Error(ErrorKind::kInvalidPhysics, "k_p must be nonzero");

  StateSpaceCoeffs c;
  c.a1 = -p.a_p;
  c.a2 = -(p.k1 * p.a_p / p.J1);
  c.a3 = p.m1 * p.g * p.l1 / p.J1;
  c.a4 = -(p.c1 / p.J1);
  c.b1 = p.k_p;
  c.b2 = p.k1 * p.k_p / p.J1;
  return c;
}

StateVector plant_derivative(const StateSpaceCoeffs& c, const StateVector& x,
                             double u) {
  return {x.x2, c.a1 * x.x2 + c.b1 * u, x.x4,
          c.a2 * x.x2 + c.a3 * std::sin(x.x3) + c.a4 * x.x4 + c.b2 * u};
}

double true_f(const StateSpaceCoeffs& c, const StateVector& x) {
  return c.a2 * x.x2 + c.a3 * std::sin(x.x3) + c.a4 * x.x4;
}

double true_g(const StateSpaceCoeffs& c) { return c.b2; }

double zero_dynamics_residual(const StateSpaceCoeffs& c) {
  if (c.b2 == 0.0) {
    throw Error(ErrorKind::kInvalidArgument,
                "zero dynamics residual undefined for b2 = 0");
  }
  return c.a1 - c.a2 * c.b1 / c.b2;
}

double backward_difference_estimate(double prev, double curr, double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "backward difference needs dt > 0");
  }
  return (curr - prev) / dt;
}

}  // namespace rotpend
