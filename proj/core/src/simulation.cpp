#include <cmath>
#include <sstream>

#include "rotpend/errors.hpp"
#include "rotpend/fuzzy.hpp"
#include "rotpend/sim.hpp"

namespace rotpend {

namespace detail {

void throw_nonfinite_stage(double t, int stage) {
  std::ostringstream os;
  os << "non-finite derivative in RK4 stage " << stage << " at t = " << t;
  throw DivergenceError(t, os.str());
}

}  // namespace detail

namespace {

// Augmented state: [x1 x2 x3 x4 | error integrators | θ_f | θ_g].
struct Layout {
  Eigen::Index integrators = 0;
  Eigen::Index rules = 0;

  Eigen::Index integ_begin() const { return 4; }
  Eigen::Index theta_f_begin() const { return 4 + integrators; }
  Eigen::Index theta_g_begin() const { return 4 + integrators + rules; }
  Eigen::Index size() const { return 4 + integrators + 2 * rules; }
};

StateVector plant_state(const Eigen::VectorXd& s) { return {s[0], s[1], s[2], s[3]}; }

class ClosedLoop {
 public:
  explicit ClosedLoop(const ScenarioConfig& cfg)
      : cfg_(cfg), nominal_(derive_coefficients(cfg.plant)) {
    if (cfg.controller == ControllerType::kAdaptive) {
      parts_ = cfg.fuzzy.partitions();
      const auto c = nominal_;
      auto theta_f = init_from_function(parts_, [&c](std::span<const double> X) {
        return true_f(c, StateVector{0.0, X[0], X[1], X[2]});
      });
      auto theta_g = init_from_function(
          parts_, [&c](std::span<const double>) { return true_g(c); });
      adaptive_ = AdaptiveControllerState::make(cfg.adaptive, std::move(theta_f),
                                                std::move(theta_g));
      order_ = static_cast<Eigen::Index>(cfg.adaptive.order());
      layout_.rules = adaptive_.theta_f.size();
      if (cfg.adaptive.error_mode == ErrorMode::kIntegral) {
        layout_.integrators = order_ - 2;
      }
    }
  }

  const Layout& layout() const { return layout_; }
  const AdaptiveControllerState& adaptive() const { return adaptive_; }

  Eigen::VectorXd initial_state() const {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(layout_.size());
    s[0] = cfg_.x0.x1;
    s[1] = cfg_.x0.x2;
    s[2] = cfg_.x0.x3;
    s[3] = cfg_.x0.x4;
    if (layout_.rules > 0) {
      s.segment(layout_.theta_f_begin(), layout_.rules) = adaptive_.theta_f;
      s.segment(layout_.theta_g_begin(), layout_.rules) = adaptive_.theta_g;
    }
    return s;
  }

  // Refresh the quantities that are sampled at grid point k and held over
  // the following step.
  void sample(std::size_t k, const Eigen::VectorXd& s) {
    const double dt = cfg_.dt;
    if (k == 0) {
      rate_x2_ = cfg_.x0.x2;
      rate_x4_ = cfg_.x0.x4;
    } else {
      rate_x2_ = backward_difference_estimate(prev_x1_, s[0], dt);
      rate_x4_ = backward_difference_estimate(prev_x3_, s[2], dt);
    }
    prev_x1_ = s[0];
    prev_x3_ = s[2];

    if (cfg_.controller == ControllerType::kAdaptive &&
        cfg_.adaptive.error_mode == ErrorMode::kDerivative) {
      const double t = static_cast<double>(k) * dt;
      const auto ref = reference(t, cfg_.reference);
      const double edot = ref[1] - view(s).x4;
      const double eddot = k >= 1 ? (edot - edot_prev_) / dt : 0.0;
      e3_ = k >= 2 ? (eddot - eddot_prev_) / dt : 0.0;
      edot_prev_ = edot;
      eddot_prev_ = eddot;
      e2_ = eddot;
    }
  }

  struct Eval {
    double u = 0.0;
    bool clamp = false;
  };

  Eval evaluate(double t, const Eigen::VectorXd& s, Eigen::VectorXd* deriv) const {
    const StateVector x = plant_state(s);
    const StateVector xv = view(s);
    const auto ref = reference(t, cfg_.reference);
    Eval out;

    if (deriv) deriv->setZero(s.size());

    if (cfg_.controller == ControllerType::kClassical) {
      const double v = fl_outer_v(xv.x3 - ref[0], xv.x4 - ref[1], ref[2], cfg_.fl);
      out.u = fl_control(nominal_, xv, v);
    } else {
      const Eigen::VectorXd e_vec = error_vector(s, xv, ref);
      const double feedforward =
          cfg_.adaptive.error_mode == ErrorMode::kIntegral
              ? ref[2]
              : ref[static_cast<std::size_t>(order_)];
      const auto inputs = fuzzy_inputs(xv);
      const Eigen::VectorXd xi = fuzzy_basis(parts_, inputs);
      const auto theta_f = s.segment(layout_.theta_f_begin(), layout_.rules);
      const auto theta_g = s.segment(layout_.theta_g_begin(), layout_.rules);
      const auto cmd = adaptive_control(theta_f, theta_g, xi, xi, e_vec,
                                        feedforward, cfg_.adaptive);
      out.u = cmd.u;
      out.clamp = cmd.clamped;
      if (deriv) {
        const auto rates = adaptation_rates(e_vec, adaptive_.P, adaptive_.b, xi, xi,
                                            cmd.u, cfg_.adaptive, theta_f, theta_g);
        deriv->segment(layout_.theta_f_begin(), layout_.rules) = rates.theta_f_dot;
        deriv->segment(layout_.theta_g_begin(), layout_.rules) = rates.theta_g_dot;
        // d/dt ∫e = e, d/dt ∬e = ∫e, …
        for (Eigen::Index i = 0; i < layout_.integrators; ++i) {
          (*deriv)[layout_.integ_begin() + i] =
              i == 0 ? ref[0] - x.x3 : s[layout_.integ_begin() + i - 1];
        }
      }
    }

    if (deriv) {
      const StateVector dx = plant_derivative(coefficients_at(t), x, out.u);
      (*deriv)[0] = dx.x1;
      (*deriv)[1] = dx.x2;
      (*deriv)[2] = dx.x3;
      (*deriv)[3] = dx.x4;
    }
    return out;
  }

 private:
  StateVector view(const Eigen::VectorXd& s) const {
    if (cfg_.measurement == MeasurementMode::kTrueState) return plant_state(s);
    return {s[0], rate_x2_, s[2], rate_x4_};
  }

  StateSpaceCoeffs coefficients_at(double t) const {
    if (cfg_.schedule.events.empty()) return nominal_;
    return derive_coefficients(apply_schedule(cfg_.plant, cfg_.schedule, t));
  }

  Eigen::VectorXd error_vector(const Eigen::VectorXd& s, const StateVector& xv,
                               const std::array<double, 5>& ref) const {
    const double e = ref[0] - xv.x3;
    const double edot = ref[1] - xv.x4;
    Eigen::VectorXd ev(order_);
    if (cfg_.adaptive.error_mode == ErrorMode::kIntegral) {
      // (∫^(n−2)e, …, ∫e, e, ė)
      const Eigen::Index m = layout_.integrators;
      for (Eigen::Index i = 0; i < m; ++i) ev[i] = s[layout_.integ_begin() + m - 1 - i];
      ev[m] = e;
      ev[m + 1] = edot;
    } else {
      const double derivs[4] = {e, edot, e2_, e3_};
      for (Eigen::Index i = 0; i < order_; ++i) ev[i] = derivs[i];
    }
    return ev;
  }

  const ScenarioConfig& cfg_;
  StateSpaceCoeffs nominal_;
  std::vector<Partition> parts_;
  AdaptiveControllerState adaptive_;
  Eigen::Index order_ = 0;
  Layout layout_;

  double rate_x2_ = 0.0;
  double rate_x4_ = 0.0;
  double prev_x1_ = 0.0;
  double prev_x3_ = 0.0;
  double edot_prev_ = 0.0;
  double eddot_prev_ = 0.0;
  double e2_ = 0.0;
  double e3_ = 0.0;
};

double segment_inf_norm(const Eigen::VectorXd& s, Eigen::Index begin, Eigen::Index n) {
  return n > 0 ? s.segment(begin, n).cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

SimulationResult run_simulation(const ScenarioConfig& cfg) {
  cfg.validate();

  ClosedLoop loop(cfg);
  const Layout& lay = loop.layout();

  SimulationResult result;
  result.controller = cfg.controller;
  result.warnings = loop.adaptive().warnings;
  result.P = loop.adaptive().P;

  const std::size_t n = cfg.sample_count();
  result.trajectory.samples.reserve(n);

  auto field = [&loop](double t, const Eigen::VectorXd& s) {
    Eigen::VectorXd d;
    loop.evaluate(t, s, &d);
    return d;
  };

  Eigen::VectorXd s = loop.initial_state();
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    loop.sample(k, s);

    const auto out = loop.evaluate(t, s, nullptr);
    Sample rec;
    rec.t = t;
    rec.x = plant_state(s);
    rec.u = out.u;
    rec.ym = reference(t, cfg.reference)[0];
    rec.e = rec.ym - rec.x.x3;
    rec.theta_f_norm = segment_inf_norm(s, lay.theta_f_begin(), lay.rules);
    rec.theta_g_norm = segment_inf_norm(s, lay.theta_g_begin(), lay.rules);
    rec.clamp = out.clamp;
    rec.multipliers = cfg.schedule.multipliers(t);
    result.trajectory.samples.push_back(rec);

    if (k + 1 == n) break;

    Eigen::VectorXd next;
    try {
      next = rk4_step(field, s, t, cfg.dt);
    } catch (const DivergenceError& e) {
      result.divergence = e;
      break;
    }

    // Parameter projection keeps ‖θ‖∞ ≤ theta_cap exactly at grid points.
    if (lay.rules > 0) {
      const double cap = cfg.adaptive.theta_cap;
      auto thetas = next.segment(lay.theta_f_begin(), 2 * lay.rules);
      thetas = thetas.cwiseMax(-cap).cwiseMin(cap);
    }

    const double t_next = static_cast<double>(k + 1) * cfg.dt;
    const Eigen::Index core = 4 + lay.integrators;
    if (!next.allFinite() ||
        next.head(core).cwiseAbs().maxCoeff() > kDivergenceThreshold) {
      std::ostringstream os;
      os << "state left the bound |x| <= " << kDivergenceThreshold
         << " at t = " << t_next << " (x = " << next[0] << ", " << next[1]
         << ", " << next[2] << ", " << next[3] << ")";
      result.divergence = DivergenceError(t_next, os.str());
      break;
    }
    s = std::move(next);
  }

  if (lay.rules > 0) {
    result.theta_f = s.segment(lay.theta_f_begin(), lay.rules);
    result.theta_g = s.segment(lay.theta_g_begin(), lay.rules);
  }
  return result;
}

}  // namespace rotpend
