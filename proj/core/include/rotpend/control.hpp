#pragma once

// Controllers for the pendulum output y = x3.
//
// Classical: feedback linearization u = (−f(x) + v)/b2 with outer loop
// v = ÿm − kd·ė − kp·e.
//
// Adaptive: certainty-equivalence law u = (−f̂ + y_m^(r) + Kᵀe)/ĝ where
// f̂ = θ_fᵀξ and ĝ = θ_gᵀξ are fuzzy estimates adapted by
//   θ̇_f = −γ1·(eᵀPb)·ξ,   θ̇_g = −γ2·(eᵀPb)·ξ·u,
// P solving AᵀP + PA = −Q for the companion matrix A of K.
//
// Sign convention for the adaptive loop: e = y_m − y, so +Kᵀe opposes the
// error. With this convention the error vector obeys ė = Ae + b·[(f̂ − f) +
// (ĝ − g)u], which is what the adaptation law is derived from.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rotpend/plant.hpp"

namespace rotpend {

// ---------------------------------------------------------------------------
// Reference

struct ReferenceSignal {
  double amplitude = 0.2;  // rad
  double frequency = 1.0;  // rad/s

  bool operator==(const ReferenceSignal&) const = default;
};

/// (y_m, y_m', y_m'', y_m''', y_m'''') of amplitude·sin(frequency·t).
std::array<double, 5> reference(double t, const ReferenceSignal& r);

// ---------------------------------------------------------------------------
// Feedback linearization

struct FLControllerConfig {
  double kd = 2.0;
  double kp = 8.0;

  void validate() const;
  bool operator==(const FLControllerConfig&) const = default;
};

/// Outer loop. Here e = y − y_m and edot = ẏ − ẏm, so that substituting
/// into ÿ = v gives ë + kd·ė + kp·e = 0.
double fl_outer_v(double e, double edot, double ym_ddot,
                  const FLControllerConfig& cfg);

/// u = (−(a2·x2 + a3·sin x3 + a4·x4) + v)/b2. Throws Error(kInvalidArgument)
/// when b2 = 0.
double fl_control(const StateSpaceCoeffs& c, const StateVector& x, double v);

// ---------------------------------------------------------------------------
// Linear algebra helpers

/// Companion realization of sⁿ + k1·sⁿ⁻¹ + … + kn for K = (k1, …, kn):
/// ones on the superdiagonal, last row −(kn, …, k1).
Eigen::MatrixXd companion_matrix(std::span<const double> K);

/// Σ_i k_{n−i}·e^(i), i.e. kn multiplies the first entry of the error vector
/// and k1 the last. Matches companion_matrix.
double error_feedback(std::span<const double> K, const Eigen::VectorXd& e_vec);

/// Eigenvalue of A with the largest real part.
std::complex<double> rightmost_eigenvalue(const Eigen::MatrixXd& A);

/// Solves AᵀP + PA = −Q through the n(n+1)/2 linear equations in the upper
/// triangle of P.
///
/// Throws NotHurwitzError if A has an eigenvalue with Re ≥ 0 (no positive
/// definite solution exists), Error(kInvalidArgument) for shape problems or a
/// Q that is not symmetric positive definite, and Error(kNumericalFailure)
/// if the linear system is singular or the residual bound
/// ‖AᵀP + PA + Q‖∞ ≤ 1e-8·‖Q‖∞ cannot be met.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

/// ‖AᵀP + PA + Q‖∞ (max row sum).
double lyapunov_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& P,
                         const Eigen::MatrixXd& Q);

double inf_norm(const Eigen::MatrixXd& M);

// ---------------------------------------------------------------------------
// Adaptive fuzzy controller

enum class PMode {
  kSolved,       // P from solve_lyapunov(A(K), Q)
  kPaperMatrix,  // the published 4×4 P, loaded verbatim
};

/// How the length-n error vector is formed from the tracking error.
enum class ErrorMode {
  /// (∫^(n−2)e, …, ∫e, e, ė) with feedforward ÿm. The plant has relative
  /// degree 2, so this is the realization in which ė_vec = Ae + b(…) holds
  /// exactly for every n.
  kIntegral,
  /// (e, ė, ë, …) with feedforward y_m^(n); derivatives beyond ė come from
  /// backward differences of sampled ė.
  kDerivative,
};

std::string_view to_string(PMode m);
std::string_view to_string(ErrorMode m);

/// The 4×4 P matrix as printed with the published design (×10³).
Eigen::MatrixXd published_p_matrix();

struct AdaptiveControllerConfig {
  std::vector<double> K = {10.0, 37.0, 60.0, 36.0};
  double gamma1 = 35.0;
  double gamma2 = 6.0;
  /// One value → scalar·I; n values → diagonal; n² values → row-major.
  std::vector<double> Q = {1000.0};
  double g_floor = 1.0;
  double theta_cap = 1e4;
  PMode p_mode = PMode::kSolved;
  ErrorMode error_mode = ErrorMode::kIntegral;

  std::size_t order() const { return K.size(); }
  Eigen::MatrixXd q_matrix() const;

  /// Throws Error(kConfigSemantic) naming the offending field.
  void validate() const;

  /// K for poles {−2, −2, −3, −3}: (s+2)²(s+3)² = s⁴+10s³+37s²+60s+36.
  static AdaptiveControllerConfig stable();
  /// Published gains K = (−0.7, 1, 10.8, 0.7), published P, differentiated
  /// error vector.
  static AdaptiveControllerConfig paper();

  bool operator==(const AdaptiveControllerConfig&) const = default;
};

struct AdaptiveControllerState {
  Eigen::VectorXd theta_f;
  Eigen::VectorXd theta_g;
  Eigen::MatrixXd A;
  Eigen::MatrixXd P;
  Eigen::VectorXd b;  // (0, …, 0, 1)
  /// Invariant violations that were downgraded (paper-matrix mode only).
  std::vector<std::string> warnings;

  /// Builds A from K and P per p_mode. In kSolved mode propagates
  /// solve_lyapunov errors; in kPaperMatrix mode records warnings instead.
  static AdaptiveControllerState make(const AdaptiveControllerConfig& cfg,
                                      Eigen::VectorXd theta_f,
                                      Eigen::VectorXd theta_g);
};

struct AdaptiveCommand {
  double u = 0.0;
  double g_hat = 0.0;  // unclamped θ_gᵀξ_g
  bool clamped = false;
};

/// u = (−θ_fᵀξ_f + feedforward + Kᵀe)/max(θ_gᵀξ_g, g_floor).
AdaptiveCommand adaptive_control(const Eigen::VectorXd& theta_f,
                                  const Eigen::VectorXd& theta_g,
                                  const Eigen::VectorXd& xi_f,
                                  const Eigen::VectorXd& xi_g,
                                  const Eigen::VectorXd& e_vec,
                                  double feedforward,
                                  const AdaptiveControllerConfig& cfg);

struct AdaptationRates {
  Eigen::VectorXd theta_f_dot;
  Eigen::VectorXd theta_g_dot;
};

/// θ̇_f = −γ1·(eᵀPb)·ξ_f, θ̇_g = −γ2·(eᵀPb)·ξ_g·u, with components zeroed
/// where |θ_j| ≥ theta_cap and the rate points further outward.
AdaptationRates adaptation_rates(const Eigen::VectorXd& e_vec,
                                 const Eigen::MatrixXd& P,
                                 const Eigen::VectorXd& b,
                                 const Eigen::VectorXd& xi_f,
                                 const Eigen::VectorXd& xi_g, double u,
                                 const AdaptiveControllerConfig& cfg,
                                 const Eigen::VectorXd& theta_f,
                                 const Eigen::VectorXd& theta_g);

}  // namespace rotpend
