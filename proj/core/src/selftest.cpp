#include "rotpend/selftest.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "rotpend/control.hpp"
#include "rotpend/errors.hpp"
#include "rotpend/fuzzy.hpp"
#include "rotpend/plant.hpp"
#include "rotpend/sim.hpp"

namespace rotpend {

namespace {

// Hand arithmetic on the published constants:
//   a2 = −k1·a_p/J1 = −0.0019·33.04/0.001031
//   a3 = m1·g·l1/J1 = 0.086184·9.8066·0.113/0.001031
//   a4 = −c1/J1     = −0.002979/0.001031
//   b2 = k1·k_p/J1  = 0.0019·74.89/0.001031
constexpr double kA2 = -60.88845780795344;
constexpr double kA3 = 92.63282020096992;
constexpr double kA4 = -2.8894277400581956;
constexpr double kB2 = 138.0126091173618;

// Rightmost root of s⁴ − 0.7s³ + s² + 10.8s + 0.7 (the published A matrix).
const std::complex<double> kPublishedEigen{1.30187962, 2.03521883};

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::abs(b);
}

ScenarioConfig nominal_scenario(ControllerType type) {
  ScenarioConfig cfg;
  cfg.controller = type;
  return cfg;
}

ScenarioConfig uncertainty_scenario(ControllerType type) {
  ScenarioConfig cfg = nominal_scenario(type);
  cfg.schedule = default_uncertainty_schedule();
  return cfg;
}

bool bitwise_equal(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) return false;
  auto same = [](double x, double y) {
    return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& p = a.samples[i];
    const auto& q = b.samples[i];
    const double lhs[] = {p.t, p.x.x1, p.x.x2, p.x.x3, p.x.x4, p.u, p.ym, p.e,
                          p.theta_f_norm, p.theta_g_norm};
    const double rhs[] = {q.t, q.x.x1, q.x.x2, q.x.x3, q.x.x4, q.u, q.ym, q.e,
                          q.theta_f_norm, q.theta_g_norm};
    for (std::size_t j = 0; j < std::size(lhs); ++j) {
      if (!same(lhs[j], rhs[j])) return false;
    }
    if (p.clamp != q.clamp) return false;
  }
  return true;
}

Outcome check_coefficients() {
  const auto c = derive_coefficients(PhysicalParams{});
  const bool ok = c.a1 == -33.04 && c.b1 == 74.89 && rel_close(c.a2, kA2, 1e-10) &&
                  rel_close(c.a3, kA3, 1e-10) && rel_close(c.a4, kA4, 1e-10) &&
                  rel_close(c.b2, kB2, 1e-10);
  return {ok, fmt("a1=%.6g a2=%.10g a3=%.10g a4=%.10g b1=%.6g b2=%.10g", c.a1, c.a2,
                  c.a3, c.a4, c.b1, c.b2)};
}

PhysicalParams random_params(std::mt19937_64& rng) {
  // Log-uniform over four decades around the published values.
  std::uniform_real_distribution<double> decade(-2.0, 2.0);
  PhysicalParams p;
  for (PhysicalParam which : kAllPhysicalParams) {
    p.set(which, p.get(which) * std::pow(10.0, decade(rng)));
  }
  return p;
}

Outcome check_zero_dynamics(std::mt19937_64& rng) {
  double worst = 0.0;
  auto probe = [&](const PhysicalParams& p) {
    const auto c = derive_coefficients(p);
    worst = std::max(worst, std::abs(zero_dynamics_residual(c)) / std::abs(c.a1));
  };
  probe(PhysicalParams{});
  for (int i = 0; i < 1000; ++i) probe(random_params(rng));
  return {worst <= 1e-12, fmt("max |a1 - a2 b1/b2|/|a1| = %.3g over 1001 parameter sets", worst)};
}

Outcome check_exact_linearization(std::mt19937_64& rng) {
  const auto c = derive_coefficients(PhysicalParams{});
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const StateVector x{10.0 * U(rng), 25.0 * U(rng), 3.2 * U(rng), 10.0 * U(rng)};
    const double v = 100.0 * U(rng);
    const double u = fl_control(c, x, v);
    const double ydd = plant_derivative(c, x, u).x4;
    worst = std::max(worst, std::abs(ydd - v));
  }
  return {worst <= 1e-10, fmt("max |y'' - v| = %.3g over 1000 random states", worst)};
}

Eigen::MatrixXd random_hurwitz(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> re(-3.0, -0.2);
  std::uniform_real_distribution<double> im(0.0, 3.0);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index i = 0;
  while (i < n) {
    if (i + 1 < n && U(rng) > 0.0) {
      const double a = re(rng);
      const double b = im(rng);
      D(i, i) = a;
      D(i + 1, i + 1) = a;
      D(i, i + 1) = b;
      D(i + 1, i) = -b;
      i += 2;
    } else {
      D(i, i) = re(rng);
      i += 1;
    }
  }
  Eigen::MatrixXd V(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index col = 0; col < n; ++col) V(r, col) = U(rng);
  }
  V += 2.0 * Eigen::MatrixXd::Identity(n, n);
  return V * D * V.inverse();
}

Outcome check_lyapunov(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(2, 6);
  double worst = 0.0;
  int non_pd = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = dim(rng);
    const Eigen::MatrixXd A = random_hurwitz(rng, n);
    const Eigen::MatrixXd Q = 1000.0 * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd P;
    try {
      P = solve_lyapunov(A, Q);
    } catch (const Error& e) {
      return {false, fmt("trial %d (n=%d) threw: %s", trial, static_cast<int>(n), e.what())};
    }
    worst = std::max(worst, lyapunov_residual(A, P, Q) / inf_norm(Q));
    if (Eigen::LLT<Eigen::MatrixXd>(P).info() != Eigen::Success) ++non_pd;
  }

  // Hand-solved: A = [[0,1],[-2,-3]], Q = 2I gives P = [[2.5,0.5],[0.5,0.5]].
  Eigen::MatrixXd A2(2, 2);
  A2 << 0, 1, -2, -3;
  Eigen::MatrixXd P2_expected(2, 2);
  P2_expected << 2.5, 0.5, 0.5, 0.5;
  const Eigen::MatrixXd P2 = solve_lyapunov(A2, 2.0 * Eigen::MatrixXd::Identity(2, 2));
  const double hand_err = (P2 - P2_expected).cwiseAbs().maxCoeff();

  const bool ok = worst <= 1e-8 && non_pd == 0 && hand_err <= 1e-12;
  return {ok, fmt("max relative residual %.3g over 100 random Hurwitz A, %d not PD, "
                  "2x2 hand case error %.3g",
                  worst, non_pd, hand_err)};
}

Outcome check_partition_of_unity(std::mt19937_64& rng) {
  const auto parts = FuzzyConfig{}.partitions();
  std::vector<std::uniform_real_distribution<double>> axis;
  for (const auto& p : parts) axis.emplace_back(p.lo(), p.hi());

  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double X[3] = {axis[0](rng), axis[1](rng), axis[2](rng)};
    worst = std::max(worst, std::abs(fuzzy_basis(parts, X).sum() - 1.0));
  }
  int not_one_hot = 0;
  const std::size_t n = rule_count(parts);
  for (std::size_t j = 0; j < n; ++j) {
    const auto X = grid_point(parts, j);
    const auto xi = fuzzy_basis(parts, X);
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    expect[static_cast<Eigen::Index>(j)] = 1.0;
    if (xi != expect) ++not_one_hot;
  }
  return {worst < 1e-12 && not_one_hot == 0 && n == 125,
          fmt("max |sum xi - 1| = %.3g over 1e4 inputs; %d of %zu grid points not one-hot",
              worst, not_one_hot, n)};
}

Eigen::VectorXd open_loop_pendulum(double dt, std::size_t steps) {
  const auto c = derive_coefficients(PhysicalParams{});
  auto field = [&c](double, const Eigen::VectorXd& s) {
    const auto d = plant_derivative(c, {s[0], s[1], s[2], s[3]}, 0.0);
    Eigen::VectorXd out(4);
    out << d.x1, d.x2, d.x3, d.x4;
    return out;
  };
  Eigen::VectorXd s(4);
  s << 0.0, 0.0, 0.1, 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    s = rk4_step(field, s, static_cast<double>(k) * dt, dt);
  }
  return s;
}

Outcome check_rk4_order() {
  const Eigen::VectorXd ref = open_loop_pendulum(1e-6, 1000000);
  const double e1 = (open_loop_pendulum(1e-3, 1000) - ref).cwiseAbs().maxCoeff();
  const double e2 = (open_loop_pendulum(5e-4, 2000) - ref).cwiseAbs().maxCoeff();
  const double ratio = e1 / e2;
  return {ratio >= 16.0 * 0.8 && ratio <= 16.0 * 1.2,
          fmt("error(dt=1e-3)=%.3g error(dt=5e-4)=%.3g ratio=%.3f (target 16 +/- 20%%)", e1,
              e2, ratio)};
}

Outcome check_classical_band() {
  const auto r = run_simulation(nominal_scenario(ControllerType::kClassical));
  if (!r.completed()) return {false, std::string("diverged: ") + r.divergence->what()};
  const auto m = compute_metrics(r.trajectory);
  const bool ok = m.steady_band.min >= -0.3 && m.steady_band.max <= 0.3;
  return {ok, fmt("steady-state band [%.4f, %.4f] rad (limit +/-0.3)", m.steady_band.min,
                  m.steady_band.max)};
}

Outcome check_adaptive_superiority() {
  const auto classical = run_simulation(nominal_scenario(ControllerType::kClassical));
  const auto adaptive = run_simulation(nominal_scenario(ControllerType::kAdaptive));
  if (!classical.completed() || !adaptive.completed()) return {false, "a run diverged"};
  const auto mc = compute_metrics(classical.trajectory);
  const auto ma = compute_metrics(adaptive.trajectory);
  const bool ok = ma.rms_final < mc.rms_final && ma.max_abs_final <= 0.05;
  return {ok, fmt("final-window RMS adaptive %.3g vs classical %.3g; adaptive max |e| %.3g "
                  "(limit 0.05)",
                  ma.rms_final, mc.rms_final, ma.max_abs_final)};
}

Outcome check_adaptive_robustness() {
  const double t_step = 10.0;
  const auto classical = run_simulation(uncertainty_scenario(ControllerType::kClassical));
  const auto adaptive = run_simulation(uncertainty_scenario(ControllerType::kAdaptive));
  if (!adaptive.completed()) return {false, "adaptive run diverged"};
  const double t_end = adaptive.trajectory.samples.back().t;
  const auto recovered = window_stats(adaptive.trajectory, t_step + 5.0, t_end + 1.0);
  const auto pre = window_stats(classical.trajectory, 0.0, t_step);
  const auto post = window_stats(classical.trajectory, t_step, t_end + 1.0);
  const bool ok = recovered.max_abs <= 0.1 && post.rms > 2.0 * pre.rms;
  return {ok, fmt("adaptive max |e| on [%.0f, %.0f] s = %.3g (limit 0.1); classical RMS "
                  "pre-step %.3g, post-step %.3g (ratio %.1f, need > 2)",
                  t_step + 5.0, t_end, recovered.max_abs, pre.rms, post.rms,
                  post.rms / pre.rms)};
}

Outcome check_bounded_deterministic() {
  std::vector<std::pair<std::string, ScenarioConfig>> presets;
  presets.emplace_back("stable/nominal", nominal_scenario(ControllerType::kAdaptive));
  presets.emplace_back("stable/uncertainty", uncertainty_scenario(ControllerType::kAdaptive));
  {
    ScenarioConfig paper = nominal_scenario(ControllerType::kAdaptive);
    paper.preset = "paper";
    paper.adaptive = AdaptiveControllerConfig::paper();
    presets.emplace_back("paper/paper-matrix", paper);
  }
  presets.emplace_back("classical/nominal", nominal_scenario(ControllerType::kClassical));
  presets.emplace_back("classical/uncertainty", uncertainty_scenario(ControllerType::kClassical));

  std::ostringstream detail;
  bool ok = true;
  for (const auto& [name, cfg] : presets) {
    const auto a = run_simulation(cfg);
    const auto b = run_simulation(cfg);
    const double cap = cfg.adaptive.theta_cap;
    double max_theta = 0.0;
    bool finite = true;
    for (const auto& s : a.trajectory.samples) {
      max_theta = std::max({max_theta, s.theta_f_norm, s.theta_g_norm});
      finite = finite && s.x.all_finite() && std::isfinite(s.u) &&
               std::isfinite(s.theta_f_norm) && std::isfinite(s.theta_g_norm);
    }
    const bool same = bitwise_equal(a.trajectory, b.trajectory);
    const bool case_ok = finite && max_theta <= cap && same;
    ok = ok && case_ok;
    if (detail.tellp() > 0) detail << "; ";
    detail << name << ": max|theta| " << max_theta << (same ? ", identical" : ", DIFFERENT")
           << (a.completed() ? "" : ", diverged (partial trajectory)");
  }
  return {ok, detail.str()};
}

Outcome check_paper_preset() {
  ScenarioConfig cfg = nominal_scenario(ControllerType::kAdaptive);
  cfg.preset = "paper";
  cfg.adaptive = AdaptiveControllerConfig::paper();
  cfg.adaptive.p_mode = PMode::kSolved;

  std::complex<double> reported{};
  bool threw = false;
  try {
    run_simulation(cfg);
  } catch (const NotHurwitzError& e) {
    threw = true;
    reported = e.eigenvalue();
  }
  const bool eig_ok = threw && reported.real() > 0.0 && std::abs(reported - kPublishedEigen) < 1e-6;

  cfg.adaptive.p_mode = PMode::kPaperMatrix;
  const auto r = run_simulation(cfg);
  bool warned = false;
  for (const auto& w : r.warnings) {
    if (w.find("not symmetric positive definite") != std::string::npos) warned = true;
  }
  const bool ran = !r.trajectory.empty();
  std::string outcome = r.completed()
                            ? "completed"
                            : fmt("diverged at t=%.3f s", r.divergence->time());
  return {eig_ok && warned && ran,
          fmt("solved mode: %s eigenvalue %.6f%+.6fj; paper-matrix mode: %zu samples, %s, "
              "SPD warning %s",
              threw ? "non-Hurwitz error naming" : "NO ERROR,", reported.real(),
              reported.imag(), r.trajectory.size(), outcome.c_str(),
              warned ? "reported" : "MISSING")};
}

}  // namespace

std::vector<CheckResult> run_acceptance_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"coefficient reproduction", check_coefficients},
      {"zero-dynamics identity", [&] { return check_zero_dynamics(rng); }},
      {"exact linearization", [&] { return check_exact_linearization(rng); }},
      {"Lyapunov solver", [&] { return check_lyapunov(rng); }},
      {"fuzzy partition of unity", [&] { return check_partition_of_unity(rng); }},
      {"RK4 order", check_rk4_order},
      {"classical tracking band", check_classical_band},
      {"adaptive superiority (nominal)", check_adaptive_superiority},
      {"adaptive robustness (uncertainty)", check_adaptive_robustness},
      {"boundedness and determinism", check_bounded_deterministic},
      {"paper-preset diagnosis", check_paper_preset},
  };

  std::vector<CheckResult> results;
  int id = 0;
  for (const auto& [name, fn] : checks) {
    CheckResult r;
    r.id = ++id;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto o = fn();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("unexpected exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_check(const CheckResult& r) {
  return fmt("%s %2d  %-34s %7.3fs  %s", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
             r.seconds, r.detail.c_str());
}

}  // namespace rotpend
