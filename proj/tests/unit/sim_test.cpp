#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "rotpend/errors.hpp"
#include "rotpend/sim.hpp"

namespace rotpend {
namespace {

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

TEST(Rk4, ZeroFieldLeavesStateUnchanged) {
  Eigen::VectorXd s(3);
  s << 1, -2, 3;
  auto zero = [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd::Zero(x.size()); };
  EXPECT_EQ(rk4_step(zero, s, 0.0, 0.1), s);
}

TEST(Rk4, ExponentialDecayStep) {
  auto decay = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd { return -x; };
  EXPECT_NEAR(rk4_step(decay, scalar(1.0), 0.0, 0.1)[0], 0.9048375, 1e-15);
}

TEST(Rk4, ExactForQuarticTime) {
  // x' = 4t³ integrates to t⁴; RK4 is exact for this up to rounding.
  auto f = [](double t, const Eigen::VectorXd&) { return scalar(4 * t * t * t); };
  const double t0 = 0.7, h = 0.3;
  const double got = rk4_step(f, scalar(std::pow(t0, 4)), t0, h)[0];
  EXPECT_NEAR(got, std::pow(t0 + h, 4), 1e-14);

  auto g = [](double t, const Eigen::VectorXd&) { return scalar(3 * t * t); };
  EXPECT_NEAR(rk4_step(g, scalar(0.0), 0.0, 0.5)[0], 0.125, 1e-15);
}

TEST(Rk4, NonFiniteStageThrowsWithTime) {
  auto bad = [](double, const Eigen::VectorXd&) { return scalar(NAN); };
  try {
    rk4_step(bad, scalar(1.0), 2.5, 0.1);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.time(), 2.5);
  }
}

TEST(Schedule, EmptyLeavesParametersUnchanged) {
  const PhysicalParams base;
  for (double t : {0.0, 5.0, 100.0}) EXPECT_EQ(apply_schedule(base, {}, t), base);
}

TEST(Schedule, StepOnMass) {
  ParameterSchedule s;
  s.events.push_back({PhysicalParam::kM1, ScheduleKind::kStep, 10.0, 1.3});
  const PhysicalParams base;
  EXPECT_EQ(apply_schedule(base, s, 9.999).m1, base.m1);
  EXPECT_NEAR(apply_schedule(base, s, 10.0).m1, 0.1120392, 1e-15);
}

TEST(Schedule, RampAndSine) {
  ScheduleEvent ramp{PhysicalParam::kC1, ScheduleKind::kRamp, 5.0, 1.5, 10.0};
  EXPECT_EQ(ramp.multiplier(4.0), 1.0);
  EXPECT_DOUBLE_EQ(ramp.multiplier(7.5), 1.25);
  EXPECT_EQ(ramp.multiplier(12.0), 1.5);

  ScheduleEvent sine{PhysicalParam::kG, ScheduleKind::kSine, 1.0, 0.2, 0.0, 4.0};
  EXPECT_EQ(sine.multiplier(0.5), 1.0);
  EXPECT_NEAR(sine.multiplier(2.0), 1.2, 1e-15);
  EXPECT_NEAR(sine.multiplier(3.0), 1.0, 1e-15);
}

TEST(Schedule, EventsOnSameParameterMultiply) {
  ParameterSchedule s;
  s.events.push_back({PhysicalParam::kM1, ScheduleKind::kStep, 1.0, 2.0});
  s.events.push_back({PhysicalParam::kM1, ScheduleKind::kStep, 2.0, 1.5});
  EXPECT_EQ(s.multiplier(PhysicalParam::kM1, 3.0), 3.0);
  EXPECT_EQ(s.multipliers(3.0)[0], 3.0);
  EXPECT_EQ(s.multipliers(3.0)[1], 1.0);
}

TEST(Schedule, RejectsInvariantViolations) {
  auto expect_invalid = [](ScheduleEvent ev) {
    ParameterSchedule s;
    s.events.push_back(ev);
    try {
      s.validate();
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kScenarioInvalid);
    }
  };
  expect_invalid({PhysicalParam::kJ1, ScheduleKind::kStep, 1.0, -1.0});
  expect_invalid({PhysicalParam::kM1, ScheduleKind::kStep, 1.0, 0.0});
  expect_invalid({PhysicalParam::kKp, ScheduleKind::kSine, 0.0, 1.5, 0.0, 1.0});
  expect_invalid({PhysicalParam::kC1, ScheduleKind::kRamp, 5.0, 1.5, 5.0});
  expect_invalid({PhysicalParam::kC1, ScheduleKind::kSine, 0.0, 0.5, 0.0, 0.0});
  expect_invalid({PhysicalParam::kC1, ScheduleKind::kStep, -1.0, 1.5});
}

TEST(Schedule, DefaultUncertainty) {
  const auto s = default_uncertainty_schedule();
  ASSERT_EQ(s.events.size(), 2u);
  EXPECT_EQ(s.multiplier(PhysicalParam::kM1, 10.0), 1.3);
  EXPECT_EQ(s.multiplier(PhysicalParam::kC1, 10.0), 1.5);
  EXPECT_EQ(s.multiplier(PhysicalParam::kC1, 9.0), 1.0);
}

ScenarioConfig short_run(ControllerType c, double t_end = 2.0) {
  ScenarioConfig cfg;
  cfg.controller = c;
  cfg.t_end = t_end;
  return cfg;
}

TEST(Scenario, SampleCount) {
  ScenarioConfig cfg;
  EXPECT_EQ(cfg.sample_count(), 20001u);
  cfg.dt = 0.1;
  cfg.t_end = 0.3;
  EXPECT_EQ(cfg.sample_count(), 4u);
}

TEST(Scenario, ValidateRejects) {
  auto bad = [](auto mutate, ErrorKind kind) {
    ScenarioConfig c;
    mutate(c);
    try {
      c.validate();
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), kind) << e.what();
    }
  };
  bad([](auto& c) { c.dt = 0; }, ErrorKind::kConfigSemantic);
  bad([](auto& c) { c.t_end = 1e-4; }, ErrorKind::kConfigSemantic);
  bad([](auto& c) { c.fuzzy.axes[1].centers = 1; }, ErrorKind::kConfigSemantic);
  bad([](auto& c) { c.fuzzy.axes[0].hi = -30; }, ErrorKind::kConfigSemantic);
  bad([](auto& c) { c.plant.l1 = 0; }, ErrorKind::kScenarioInvalid);
}

TEST(Simulation, ZeroReferenceStaysAtRest) {
  for (auto mode : {MeasurementMode::kTrueState, MeasurementMode::kBackwardDifference}) {
    for (auto ctrl : {ControllerType::kClassical, ControllerType::kAdaptive}) {
      auto cfg = short_run(ctrl);
      cfg.measurement = mode;
      cfg.reference.amplitude = 0;
      const auto res = run_simulation(cfg);
      ASSERT_TRUE(res.completed());
      for (const auto& s : res.trajectory.samples) {
        EXPECT_EQ(s.e, 0.0);
        EXPECT_EQ(s.u, 0.0);
        EXPECT_EQ(s.x, StateVector{});
      }
    }
  }
}

TEST(Simulation, GridAndColumns) {
  const auto res = run_simulation(short_run(ControllerType::kClassical, 0.5));
  const auto& s = res.trajectory.samples;
  ASSERT_EQ(s.size(), 501u);
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_EQ(s[k].t, static_cast<double>(k) * 1e-3);
    EXPECT_EQ(s[k].e, s[k].ym - s[k].x.x3);
    EXPECT_EQ(s[k].theta_f_norm, 0.0);
  }
  EXPECT_EQ(res.theta_f.size(), 0);
}

TEST(Simulation, TrueStateFeedbackLinearizationIsExact) {
  auto cfg = short_run(ControllerType::kClassical, 20.0);
  cfg.measurement = MeasurementMode::kTrueState;
  const auto m = compute_metrics(run_simulation(cfg).trajectory);
  // Only the initial mismatch ė(0) = 0.2 remains, decaying with s² + 2s + 8.
  EXPECT_LT(m.max_abs_final, 1e-6);
}

TEST(Simulation, ClassicalTrackingBand) {
  auto cfg = short_run(ControllerType::kClassical, 20.0);
  const auto m = compute_metrics(run_simulation(cfg).trajectory);
  EXPECT_GE(m.steady_band.min, -0.3);
  EXPECT_LE(m.steady_band.max, 0.3);
}

TEST(Simulation, AdaptiveBeatsClassical) {
  const auto c = compute_metrics(run_simulation(short_run(ControllerType::kClassical, 20)).trajectory);
  const auto res = run_simulation(short_run(ControllerType::kAdaptive, 20));
  ASSERT_TRUE(res.completed());
  const auto a = compute_metrics(res.trajectory);
  EXPECT_LT(a.rms_final, c.rms_final);
  EXPECT_LE(a.max_abs_final, 0.05);
  EXPECT_EQ(res.theta_f.size(), 125);
  EXPECT_EQ(res.P.rows(), 4);
}

TEST(Simulation, Deterministic) {
  auto cfg = short_run(ControllerType::kAdaptive, 3.0);
  cfg.schedule.events.push_back({PhysicalParam::kC1, ScheduleKind::kSine, 0.5, 0.3, 0.0, 1.0});
  const auto a = run_simulation(cfg);
  const auto b = run_simulation(cfg);
  EXPECT_EQ(a.trajectory, b.trajectory);
  EXPECT_EQ(a.theta_f, b.theta_f);
}

TEST(Simulation, ThetaStaysWithinCap) {
  auto cfg = short_run(ControllerType::kAdaptive, 20.0);
  cfg.adaptive.theta_cap = 2000;
  cfg.schedule = default_uncertainty_schedule();
  const auto res = run_simulation(cfg);
  for (const auto& s : res.trajectory.samples) {
    EXPECT_LE(s.theta_f_norm, 2000.0);
    EXPECT_LE(s.theta_g_norm, 2000.0);
  }
}

TEST(Simulation, ScheduleMultipliersAreRecorded) {
  auto cfg = short_run(ControllerType::kClassical, 12.0);
  cfg.schedule = default_uncertainty_schedule();
  const auto res = run_simulation(cfg);
  EXPECT_EQ(res.trajectory.samples[9000].multipliers[0], 1.0);
  EXPECT_EQ(res.trajectory.samples[11000].multipliers[0], 1.3);
  EXPECT_EQ(res.trajectory.samples[11000].multipliers[6], 1.5);
}

TEST(Simulation, PublishedGainsWithSolvedPThrow) {
  auto cfg = short_run(ControllerType::kAdaptive);
  cfg.adaptive = AdaptiveControllerConfig::paper();
  cfg.adaptive.p_mode = PMode::kSolved;
  EXPECT_THROW(run_simulation(cfg), NotHurwitzError);
}

TEST(Simulation, PublishedMatrixRunsThenDiverges) {
  auto cfg = short_run(ControllerType::kAdaptive);
  cfg.adaptive = AdaptiveControllerConfig::paper();
  const auto res = run_simulation(cfg);
  EXPECT_FALSE(res.warnings.empty());
  ASSERT_TRUE(res.divergence.has_value());
  EXPECT_FALSE(res.trajectory.empty());
  EXPECT_LE(res.trajectory.samples.back().t, res.divergence->time());
  for (const auto& s : res.trajectory.samples) EXPECT_TRUE(s.x.all_finite());
}

// The differentiated error vector feeds the previous control back through
// ë, which is unstable for the stable gains as well.
TEST(Simulation, DerivativeErrorModeDiverges) {
  auto cfg = short_run(ControllerType::kAdaptive);
  cfg.adaptive.error_mode = ErrorMode::kDerivative;
  EXPECT_FALSE(run_simulation(cfg).completed());
}

TEST(Simulation, LowerOrderIntegralModeTracks) {
  auto cfg = short_run(ControllerType::kAdaptive, 10.0);
  cfg.adaptive.K = {4, 4};  // (s+2)²
  const auto res = run_simulation(cfg);
  ASSERT_TRUE(res.completed());
  EXPECT_LT(compute_metrics(res.trajectory).max_abs_final, 0.1);
}

Trajectory make_traj(double t_end, double dt, double (*e)(double)) {
  Trajectory tr;
  for (int k = 0; k * dt <= t_end + 1e-12; ++k) {
    Sample s;
    s.t = k * dt;
    s.e = e(s.t);
    tr.samples.push_back(s);
  }
  return tr;
}

TEST(Metrics, ZeroError) {
  const auto m = compute_metrics(make_traj(4, 0.01, [](double) { return 0.0; }));
  EXPECT_EQ(m.steady_band.min, 0.0);
  EXPECT_EQ(m.steady_band.max, 0.0);
  EXPECT_EQ(m.rms, 0.0);
  EXPECT_EQ(m.rms_final, 0.0);
  ASSERT_TRUE(m.settle_time.has_value());
  EXPECT_EQ(*m.settle_time, 0.0);
}

TEST(Metrics, Sinusoid) {
  const double T = 8 * std::numbers::pi;  // final window is one full period
  const auto m = compute_metrics(make_traj(T, 1e-3, [](double t) { return 0.1 * std::sin(t); }));
  EXPECT_NEAR(m.steady_band.min, -0.1, 1e-6);
  EXPECT_NEAR(m.steady_band.max, 0.1, 1e-6);
  EXPECT_NEAR(m.rms_final, 0.1 / std::sqrt(2.0), 1e-4);
  // The last sample (sin 8π) is inside the threshold, so a settle time
  // exists but only after the final zero crossing.
  ASSERT_TRUE(m.settle_time.has_value());
  EXPECT_NEAR(*m.settle_time, T - std::asin(0.1), 2e-3);
}

TEST(Metrics, ConstantAndSettling) {
  auto m = compute_metrics(make_traj(4, 0.01, [](double) { return 0.27; }));
  EXPECT_EQ(m.steady_band.min, 0.27);
  EXPECT_EQ(m.steady_band.max, 0.27);

  m = compute_metrics(make_traj(4, 0.5, [](double t) { return t < 1.2 ? 1.0 : 0.001; }), 0.01);
  ASSERT_TRUE(m.settle_time.has_value());
  EXPECT_EQ(*m.settle_time, 1.5);
}

TEST(Metrics, Errors) {
  EXPECT_THROW(compute_metrics(Trajectory{}), Error);
  const auto tr = make_traj(1, 0.1, [](double t) { return t; });
  EXPECT_THROW(window_stats(tr, 5, 6), Error);
  const auto w = window_stats(tr, 0.0, 0.25);
  EXPECT_EQ(w.count, 3u);
  EXPECT_NEAR(w.max, 0.2, 1e-15);
}

}  // namespace
}  // namespace rotpend
