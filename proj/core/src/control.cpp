#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rotpend/control.hpp"
#include "rotpend/errors.hpp"

namespace rotpend {

std::array<double, 5> reference(double t, const ReferenceSignal& r) {
  const double w = r.frequency;
  const double s = r.amplitude * std::sin(w * t);
  const double c = r.amplitude * std::cos(w * t);
  const double w2 = w * w;
  return {s, w * c, -w2 * s, -w2 * w * c, w2 * w2 * s};
}

void FLControllerConfig::validate() const {
  if (!(kd > 0.0)) throw Error(ErrorKind::kConfigSemantic, "controller.kd must be positive");
  if (!(kp > 0.0)) throw Error(ErrorKind::kConfigSemantic, "controller.kp must be positive");
}

double fl_outer_v(double e, double edot, double ym_ddot, const FLControllerConfig& cfg) {
  return ym_ddot - cfg.kd * edot - cfg.kp * e;
}

double fl_control(const StateSpaceCoeffs& c, const StateVector& x, double v) {
  if (c.b2 == 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "feedback linearization needs b2 != 0");
  }
  return (-(c.a2 * x.x2 + c.a3 * std::sin(x.x3) + c.a4 * x.x4) + v) / c.b2;
}

std::string_view to_string(PMode m) {
  return m == PMode::kSolved ? "solved" : "paper-matrix";
}

std::string_view to_string(ErrorMode m) {
  return m == ErrorMode::kIntegral ? "integral" : "derivative";
}

Eigen::MatrixXd published_p_matrix() {
  Eigen::MatrixXd P(4, 4);
  P << 7.7709, 0.3740, -0.5139, 0.7143,
       0.3740, -4.6545, -0.9861, 0.0809,
       -0.5139, -0.9861, 0.2394, -0.4861,
       0.7143, 0.0809, -0.4861, -0.0199;
  return 1e3 * P;
}

Eigen::MatrixXd AdaptiveControllerConfig::q_matrix() const {
  const auto n = static_cast<Eigen::Index>(order());
  if (Q.size() == 1) return Q[0] * Eigen::MatrixXd::Identity(n, n);
  if (static_cast<Eigen::Index>(Q.size()) == n) {
    return Eigen::Map<const Eigen::VectorXd>(Q.data(), n).asDiagonal();
  }
  if (static_cast<Eigen::Index>(Q.size()) == n * n) {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                          Eigen::RowMajor>>(Q.data(), n, n);
  }
  throw Error(ErrorKind::kConfigSemantic,
              "controller.Q must have 1, n or n*n entries for n = " +
                  std::to_string(n));
}

void AdaptiveControllerConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::kConfigSemantic, what);
  };
  if (order() < 2 || order() > 4) {
    fail("controller.K must have 2, 3 or 4 entries (error-vector order)");
  }
  for (double k : K) {
    if (!std::isfinite(k)) fail("controller.K has a non-finite entry");
  }
  if (!(gamma1 > 0.0)) fail("controller.gamma1 must be positive");
  if (!(gamma2 > 0.0)) fail("controller.gamma2 must be positive");
  if (!(g_floor > 0.0)) fail("controller.g_floor must be positive");
  if (!(theta_cap > 0.0)) fail("controller.theta_cap must be positive");
  const Eigen::MatrixXd q = q_matrix();
  if (!q.allFinite() || (q - q.transpose()).cwiseAbs().maxCoeff() > 0.0 ||
      Eigen::LLT<Eigen::MatrixXd>(q).info() != Eigen::Success) {
    fail("controller.Q must be symmetric positive definite");
  }
  if (p_mode == PMode::kPaperMatrix && order() != 4) {
    fail("controller.p_mode = paper-matrix requires a 4-entry K");
  }
}

AdaptiveControllerConfig AdaptiveControllerConfig::stable() {
  return AdaptiveControllerConfig{};
}

AdaptiveControllerConfig AdaptiveControllerConfig::paper() {
  AdaptiveControllerConfig cfg;
  cfg.K = {-0.7, 1.0, 10.8, 0.7};
  cfg.p_mode = PMode::kPaperMatrix;
  cfg.error_mode = ErrorMode::kDerivative;
  return cfg;
}

AdaptiveControllerState AdaptiveControllerState::make(
    const AdaptiveControllerConfig& cfg, Eigen::VectorXd theta_f,
    Eigen::VectorXd theta_g) {
  cfg.validate();
  AdaptiveControllerState st;
  st.theta_f = std::move(theta_f);
  st.theta_g = std::move(theta_g);
  st.A = companion_matrix(cfg.K);
  const auto n = st.A.rows();
  st.b = Eigen::VectorXd::Zero(n);
  st.b[n - 1] = 1.0;

  const Eigen::MatrixXd Q = cfg.q_matrix();
  if (cfg.p_mode == PMode::kSolved) {
    st.P = solve_lyapunov(st.A, Q);
    return st;
  }

  st.P = published_p_matrix();
  std::ostringstream os;
  os.precision(6);

  const double asym = (st.P - st.P.transpose()).cwiseAbs().maxCoeff();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(
      0.5 * (st.P + st.P.transpose()), Eigen::EigenvaluesOnly);
  const double min_eig = sym.eigenvalues().minCoeff();
  if (asym > 0.0 || min_eig <= 0.0) {
    os << "P is not symmetric positive definite: max |P - P^T| = " << asym
       << ", smallest eigenvalue of the symmetric part = " << min_eig
       << ", diagonal = (" << st.P(0, 0) << ", " << st.P(1, 1) << ", "
       << st.P(2, 2) << ", " << st.P(3, 3) << ")";
    st.warnings.push_back(os.str());
    os.str("");
  }
  const double resid = lyapunov_residual(st.A, st.P, Q);
  if (resid > 1e-8 * inf_norm(Q)) {
    os << "P does not solve A^T P + P A = -Q: residual ||.||_inf = " << resid
       << " vs ||Q||_inf = " << inf_norm(Q);
    st.warnings.push_back(os.str());
    os.str("");
  }
  const auto lead = rightmost_eigenvalue(st.A);
  if (lead.real() >= 0.0) {
    os << "A is not Hurwitz: eigenvalue " << lead.real()
       << (lead.imag() < 0 ? " - " : " + ") << std::abs(lead.imag()) << "j";
    st.warnings.push_back(os.str());
  }
  return st;
}

AdaptiveCommand adaptive_control(const Eigen::VectorXd& theta_f,
                                  const Eigen::VectorXd& theta_g,
                                  const Eigen::VectorXd& xi_f,
                                  const Eigen::VectorXd& xi_g,
                                  const Eigen::VectorXd& e_vec,
                                  double feedforward,
                                  const AdaptiveControllerConfig& cfg) {
  AdaptiveCommand cmd;
  const double f_hat = theta_f.dot(xi_f);
  cmd.g_hat = theta_g.dot(xi_g);
  double divisor = cmd.g_hat;
  if (!(divisor >= cfg.g_floor)) {
    divisor = cfg.g_floor;
    cmd.clamped = true;
  }
  cmd.u = (-f_hat + feedforward + error_feedback(cfg.K, e_vec)) / divisor;
  return cmd;
}

AdaptationRates adaptation_rates(const Eigen::VectorXd& e_vec,
                                 const Eigen::MatrixXd& P,
                                 const Eigen::VectorXd& b,
                                 const Eigen::VectorXd& xi_f,
                                 const Eigen::VectorXd& xi_g, double u,
                                 const AdaptiveControllerConfig& cfg,
                                 const Eigen::VectorXd& theta_f,
                                 const Eigen::VectorXd& theta_g) {
  const double s = e_vec.dot(P * b);
  AdaptationRates r{-cfg.gamma1 * s * xi_f, -cfg.gamma2 * s * u * xi_g};

  auto project = [cap = cfg.theta_cap](Eigen::VectorXd& rate,
                                       const Eigen::VectorXd& theta) {
    for (Eigen::Index j = 0; j < rate.size(); ++j) {
      if (std::abs(theta[j]) >= cap && rate[j] * theta[j] > 0.0) rate[j] = 0.0;
    }
  };
  project(r.theta_f_dot, theta_f);
  project(r.theta_g_dot, theta_g);
  return r;
}

}  // namespace rotpend
