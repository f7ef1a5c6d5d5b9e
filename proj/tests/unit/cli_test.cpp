#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "rotpend/cli/config.hpp"
#include "rotpend/cli/csv.hpp"
#include "rotpend/cli/plot.hpp"
#include "rotpend/cli/run.hpp"

namespace rotpend::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  auto dir = fs::temp_directory_path() / "rotpend_tests" /
             (std::string(info->test_suite_name()) + "." + info->name());
  fs::remove_all(dir);
  return dir;
}

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "accepted:\n" << text;
  return ErrorKind::kIo;
}

// ---------------------------------------------------------------------------
// Config

TEST(Config, EmptyFileGivesDefaults) {
  EXPECT_EQ(parse_config(""), ScenarioConfig{});
  EXPECT_EQ(parse_config("# nothing here\n\n   \n"), ScenarioConfig{});
  const auto c = parse_config("");
  EXPECT_EQ(c.controller, ControllerType::kClassical);
  EXPECT_EQ(c.reference.amplitude, 0.2);
  EXPECT_EQ(c.dt, 1e-3);
  EXPECT_EQ(c.t_end, 20.0);
}

TEST(Config, PublishedPreset) {
  const auto c = parse_config("controller.type = adaptive\ncontroller.preset = paper\n");
  EXPECT_EQ(c.controller, ControllerType::kAdaptive);
  EXPECT_EQ(c.adaptive, AdaptiveControllerConfig::paper());
  EXPECT_EQ(c.adaptive.p_mode, PMode::kPaperMatrix);
}

TEST(Config, ExplicitKeysOverridePreset) {
  const auto c = parse_config(
      "[controller]\np_mode = solved\ntype = adaptive\npreset = paper\ngamma1 = 2\n");
  EXPECT_EQ(c.adaptive.p_mode, PMode::kSolved);
  EXPECT_EQ(c.adaptive.K, AdaptiveControllerConfig::paper().K);
  EXPECT_EQ(c.adaptive.gamma1, 2.0);
}

TEST(Config, ScheduleOneLiners) {
  auto c = parse_config("schedule.1 = step m1 1.3 at 10\n");
  ASSERT_EQ(c.schedule.events.size(), 1u);
  EXPECT_EQ(c.schedule.events[0],
            (ScheduleEvent{PhysicalParam::kM1, ScheduleKind::kStep, 10.0, 1.3}));

  c = parse_config(
      "schedule.2 = ramp c1 1.5 from 5 to 10\n"
      "schedule.1 = sine g 0.1 period 2 from 3\n"
      "schedule.3 = sine l1 0.1 period 4\n");
  ASSERT_EQ(c.schedule.events.size(), 3u);
  EXPECT_EQ(c.schedule.events[0],
            (ScheduleEvent{PhysicalParam::kG, ScheduleKind::kSine, 3.0, 0.1, 0.0, 2.0}));
  EXPECT_EQ(c.schedule.events[1],
            (ScheduleEvent{PhysicalParam::kC1, ScheduleKind::kRamp, 5.0, 1.5, 10.0}));
  EXPECT_EQ(c.schedule.events[2].start, 0.0);
}

TEST(Config, ScheduleSections) {
  const auto c = parse_config(
      "[schedule.1]\nkind = ramp\nparam = J1\nmagnitude = 1.2\nstart = 1\nend = 2\n");
  ASSERT_EQ(c.schedule.events.size(), 1u);
  EXPECT_EQ(c.schedule.events[0],
            (ScheduleEvent{PhysicalParam::kJ1, ScheduleKind::kRamp, 1.0, 1.2, 2.0}));
}

TEST(Config, SectionAndDottedFormsAgree) {
  const auto a = parse_config("[plant]\nm1 = 0.1\n[sim]\nx0 = 0, 0, 0.1, 0\n");
  const auto b = parse_config("plant.m1 = 0.1\nsim.x0 = 0 0 0.1 0\n");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.x0.x3, 0.1);
}

TEST(Config, DottedKeysInsideSectionsAreAbsolute) {
  const auto c = parse_config("[sim]\nt_end = 5\nschedule.1 = step m1 1.3 at 1\n");
  EXPECT_EQ(c.t_end, 5.0);
  ASSERT_EQ(c.schedule.events.size(), 1u);
  EXPECT_EQ(kind_of("[sim]\nsim.dt = 0.1\ndt = 0.2\n"), ErrorKind::kConfigSemantic);
}

TEST(Config, AxesAndCenters) {
  const auto c = parse_config("[controller]\nx2_range = -10, 10\ncenters = 3, 4, 5\n");
  EXPECT_EQ(c.fuzzy.axes[0].lo, -10.0);
  EXPECT_EQ(c.fuzzy.axes[0].centers, 3u);
  EXPECT_EQ(c.fuzzy.axes[1].centers, 4u);
  EXPECT_EQ(parse_config("controller.centers = 7").fuzzy.axes[2].centers, 7u);
}

TEST(Config, UncertaintyFlag) {
  const auto c = parse_config("sim.uncertainty = true\nschedule.1 = step g 1.1 at 1\n");
  ASSERT_EQ(c.schedule.events.size(), 3u);
  EXPECT_EQ(c.schedule.events[0].target, PhysicalParam::kG);
  EXPECT_EQ(c.schedule.events[1], default_uncertainty_schedule().events[0]);
}

TEST(Config, SyntaxErrorsCarryLineNumbers) {
  try {
    parse_config("# ok\n[sim]\ndt 0.001\n");
    FAIL();
  } catch (const ConfigSyntaxError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.kind(), ErrorKind::kConfigSyntax);
  }
  EXPECT_EQ(kind_of("[sim\n"), ErrorKind::kConfigSyntax);
  EXPECT_EQ(kind_of("sim.dt =\n"), ErrorKind::kConfigSyntax);
  EXPECT_EQ(kind_of("= 3\n"), ErrorKind::kConfigSyntax);
  EXPECT_EQ(kind_of("bad key = 3\n"), ErrorKind::kConfigSyntax);
}

TEST(Config, SemanticErrorsNameTheKey) {
  auto message = [](const std::string& text) -> std::string {
    try {
      parse_config(text);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfigSemantic);
      return e.what();
    }
    ADD_FAILURE() << "accepted";
    return {};
  };
  EXPECT_NE(message("sim.dtt = 1\n").find("sim.dtt"), std::string::npos);
  EXPECT_NE(message("[plant]\nmass = 1\n").find("plant.mass"), std::string::npos);
  EXPECT_NE(message("sim.dt = fast\n").find("sim.dt"), std::string::npos);
  EXPECT_NE(message("sim.dt = 1\n[sim]\ndt = 2\n").find("duplicate"), std::string::npos);
  EXPECT_NE(message("controller.type = fuzzy\n").find("controller.type"), std::string::npos);
  EXPECT_NE(message("controller.preset = best\n").find("controller.preset"), std::string::npos);
  EXPECT_NE(message("[physics]\n").find("physics"), std::string::npos);
  EXPECT_NE(message("sim.x0 = 1, 2\n").find("sim.x0"), std::string::npos);
  EXPECT_NE(message("sim.compare = maybe\n").find("sim.compare"), std::string::npos);
  EXPECT_NE(message("schedule.1 = jump m1 2 at 1\n").find("schedule.1"), std::string::npos);
  EXPECT_NE(message("schedule.1 = step mass 2 at 1\n").find("mass"), std::string::npos);
  EXPECT_NE(message("schedule.1 = step m1 2 at 1\n[schedule.1]\nkind = step\n")
                .find("schedule.1"),
            std::string::npos);
  EXPECT_NE(message("[schedule.1]\nkind = step\nparam = m1\n").find("magnitude"),
            std::string::npos);
  EXPECT_NE(message("sim.dt = -1\n").find("sim.dt"), std::string::npos);
}

TEST(Config, ScheduleViolatingInvariantsIsRejected) {
  EXPECT_EQ(kind_of("schedule.1 = step J1 -1 at 2\n"), ErrorKind::kScenarioInvalid);
  EXPECT_EQ(kind_of("schedule.1 = ramp c1 2 from 5 to 4\n"), ErrorKind::kScenarioInvalid);
  EXPECT_EQ(kind_of("plant.m1 = 0\n"), ErrorKind::kScenarioInvalid);
}

TEST(Config, OverridesWin) {
  const auto c = parse_config("sim.seed = 4\n[controller]\npreset = stable\n",
                              {{"sim.seed", "9"}, {"controller.preset", "paper"}});
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.adaptive, AdaptiveControllerConfig::paper());
}

TEST(Config, RoundTrip) {
  std::vector<ScenarioConfig> cases;
  cases.push_back({});
  cases.push_back(parse_config("controller.type = adaptive\ncontroller.preset = paper\n"));

  ScenarioConfig odd;
  odd.controller = ControllerType::kAdaptive;
  odd.fl.kd = 0.1 + 0.2;
  odd.adaptive.K = {1.0 / 3.0, 2.0};
  odd.adaptive.Q = {1e-7, 2};
  odd.adaptive.error_mode = ErrorMode::kDerivative;
  odd.fuzzy.axes[1] = {-1.0 / 7.0, 2.0 / 7.0, 9};
  odd.reference = {0.123456789012345678, 3.5};
  odd.plant.g = 9.80665;
  odd.x0 = {1e-300, -0.0, 0.1, 5e10};
  odd.dt = 1.0 / 1024.0;
  odd.t_end = 7.25;
  odd.measurement = MeasurementMode::kTrueState;
  odd.seed = 18446744073709551615ull;
  odd.compare = true;
  odd.settle_threshold = 0.02;
  odd.schedule.events = {{PhysicalParam::kM1, ScheduleKind::kStep, 10.0, 1.3},
                         {PhysicalParam::kC1, ScheduleKind::kRamp, 1.0, 0.5, 2.0, 3.0},
                         {PhysicalParam::kKp, ScheduleKind::kSine, 0.5, 0.25, 0.0, 0.3}};
  cases.push_back(odd);

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int i = 0; i < 20; ++i) {
    ScenarioConfig c;
    for (PhysicalParam p : kAllPhysicalParams) c.plant.set(p, c.plant.get(p) * u(rng));
    c.adaptive.gamma1 = u(rng);
    c.reference.frequency = u(rng);
    c.schedule.events.push_back({PhysicalParam::kG, ScheduleKind::kStep, u(rng), u(rng)});
    cases.push_back(c);
  }

  for (const auto& c : cases) {
    const auto text = to_config_text(c);
    EXPECT_EQ(parse_config(text), c) << text;
  }
}

// ---------------------------------------------------------------------------
// CSV

Trajectory random_trajectory(std::size_t n) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> d(0, 1e3);
  Trajectory tr;
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.t = static_cast<double>(i) * 1e-3;
    s.x = {d(rng), d(rng), d(rng) * 1e-9, d(rng)};
    s.u = d(rng);
    s.ym = 1.0 / 3.0;
    s.e = d(rng) * 1e-300;
    s.theta_f_norm = d(rng);
    s.theta_g_norm = 0.1;
    s.clamp = i % 3 == 0;
    tr.samples.push_back(s);
  }
  return tr;
}

TEST(Csv, SingleSampleIsTwoLines) {
  Trajectory tr;
  tr.samples.emplace_back();
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  EXPECT_EQ(os.str(), std::string(kCsvHeader) + "\n0,0,0,0,0,0,0,0,0,0,0\n");
}

TEST(Csv, ElevenColumnsLfOnly) {
  std::ostringstream os;
  write_trajectory_csv(os, random_trajectory(50));
  const auto text = os.str();
  EXPECT_EQ(text.find('\r'), std::string::npos);
  std::istringstream in(text);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 10) << line;
  }
  EXPECT_EQ(lines, 51);
}

TEST(Csv, RoundTripIsBitExact) {
  auto tr = random_trajectory(200);
  std::stringstream ss;
  write_trajectory_csv(ss, tr);
  const auto back = read_trajectory_csv(ss);
  ASSERT_EQ(back.size(), tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    auto want = tr.samples[i];
    want.multipliers = back.samples[i].multipliers;
    EXPECT_EQ(back.samples[i], want) << "row " << i;
  }
}

TEST(Csv, Errors) {
  std::ostringstream os;
  EXPECT_THROW(write_trajectory_csv(os, Trajectory{}), Error);
  std::istringstream wrong_header("a,b\n1,2\n");
  EXPECT_THROW(read_trajectory_csv(wrong_header), Error);
  std::istringstream short_row(std::string(kCsvHeader) + "\n1,2,3\n");
  EXPECT_THROW(read_trajectory_csv(short_row), Error);
  EXPECT_THROW(write_trajectory_csv("/nonexistent/dir/x.csv", random_trajectory(1)), Error);
}

// ---------------------------------------------------------------------------
// Plots

std::vector<std::string> polylines(const std::string& svg) {
  std::vector<std::string> out;
  const std::regex re("<polyline[^>]*points=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator();
       ++it) {
    out.push_back((*it)[1]);
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Plot, DeterministicAndWellFormed) {
  PlotSpec spec{"a < b & c", "t", "y", {{"s1", "red", {0, 1, 2}, {0, 1, 4}}}};
  const auto a = render_svg(spec);
  EXPECT_EQ(a, render_svg(spec));
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
  EXPECT_NE(a.find("a &lt; b &amp; c"), std::string::npos);
  ASSERT_EQ(polylines(a).size(), 1u);
}

TEST(Plot, LongSeriesAreDecimatedKeepingEndpoints) {
  Series s{"s", "black", {}, {}};
  for (int i = 0; i < 20001; ++i) {
    s.x.push_back(i);
    s.y.push_back(i % 7);
  }
  const auto pts = polylines(render_svg({"", "", "", {s}}));
  ASSERT_EQ(pts.size(), 1u);
  const auto n = std::count(pts[0].begin(), pts[0].end(), ' ') + 1;
  EXPECT_LE(n, static_cast<long>(kMaxPlotPoints) + 1);
  EXPECT_EQ(pts[0].substr(pts[0].rfind(' ') + 1).substr(0, 6), "780.00");
}

TEST(Plot, SingleRunWritesFourFiles) {
  const auto dir = scratch_dir();
  fs::create_directories(dir);
  const auto tr = random_trajectory(10);
  const auto files = emit_plots({{"adaptive", &tr}}, dir);
  ASSERT_EQ(files.size(), 4u);
  for (const auto& f : files) EXPECT_TRUE(fs::exists(f)) << f;
  EXPECT_EQ(polylines(read_file(dir / "error.svg")).size(), 1u);
  EXPECT_EQ(polylines(read_file(dir / "tracking.svg")).size(), 2u);  // y and ym
}

TEST(Plot, CompareOverlaysBothControllers) {
  const auto dir = scratch_dir();
  fs::create_directories(dir);
  const auto a = random_trajectory(10);
  const auto b = random_trajectory(10);
  emit_plots({{"classical", &a}, {"adaptive", &b}}, dir);
  for (const char* f : {"error.svg", "control.svg"}) {
    const auto svg = read_file(dir / f);
    EXPECT_EQ(polylines(svg).size(), 2u) << f;
    EXPECT_NE(svg.find("(classical)"), std::string::npos);
    EXPECT_NE(svg.find("(adaptive)"), std::string::npos);
  }
  EXPECT_EQ(polylines(read_file(dir / "tracking.svg")).size(), 3u);
}

TEST(Plot, ZeroErrorIsAFlatMidLine) {
  const auto dir = scratch_dir();
  fs::create_directories(dir);
  Trajectory tr;
  for (int i = 0; i < 5; ++i) {
    Sample s;
    s.t = i;
    tr.samples.push_back(s);
  }
  emit_plots({{"classical", &tr}}, dir);
  const auto pts = polylines(read_file(dir / "error.svg"));
  ASSERT_EQ(pts.size(), 1u);
  std::istringstream in(pts[0]);
  std::set<std::string> ys;
  std::string p;
  while (in >> p) ys.insert(p.substr(p.find(',') + 1));
  ASSERT_EQ(ys.size(), 1u);
  EXPECT_EQ(*ys.begin(), "195.00");  // centre of the plot frame
}

// ---------------------------------------------------------------------------
// run_command

TEST(RunCommand, CompareModeReportsBothControllers) {
  auto cfg = parse_config("sim.compare = true\nsim.t_end = 8\n");
  const auto dir = scratch_dir();
  const auto report = run_command(cfg, dir);
  ASSERT_EQ(report.controllers.size(), 2u);
  EXPECT_EQ(report.controllers[0].controller, ControllerType::kClassical);
  EXPECT_EQ(report.controllers[1].controller, ControllerType::kAdaptive);
  EXPECT_FALSE(report.diverged());
  ASSERT_FALSE(report.verdicts.empty());
  EXPECT_EQ(report.verdicts[0], "adaptive final-window RMS < classical: yes");
  for (const auto& f : report.files) EXPECT_TRUE(fs::exists(f)) << f;
  EXPECT_TRUE(fs::exists(dir / "trajectory_classical.csv"));
  EXPECT_TRUE(fs::exists(dir / "trajectory_adaptive.csv"));
  const auto metrics = read_file(dir / "metrics.txt");
  EXPECT_NE(metrics.find("[verdicts]"), std::string::npos);
  EXPECT_NE(metrics.find("K = 10, 37, 60, 36"), std::string::npos);

  std::ifstream csv(dir / "trajectory_adaptive.csv");
  EXPECT_EQ(read_trajectory_csv(csv).size(), cfg.sample_count());
}

TEST(RunCommand, PublishedGainsWithSolvedPNameTheEigenvalue) {
  const auto cfg = parse_config(
      "controller.type = adaptive\ncontroller.preset = paper\ncontroller.p_mode = solved\n");
  try {
    run_command(cfg, scratch_dir());
    FAIL();
  } catch (const NotHurwitzError& e) {
    EXPECT_NEAR(e.eigenvalue().real(), 1.30187962, 1e-7);
    EXPECT_NE(std::string(e.what()).find("1.30188"), std::string::npos);
  }
}

TEST(RunCommand, PublishedMatrixEchoesPresetAndWarns) {
  const auto cfg = parse_config("controller.type = adaptive\ncontroller.preset = paper\n");
  const auto dir = scratch_dir();
  const auto report = run_command(cfg, dir);
  EXPECT_TRUE(report.diverged());
  const auto metrics = read_file(dir / "metrics.txt");
  EXPECT_NE(metrics.find("K = -0.7, 1, 10.8, 0.7"), std::string::npos);
  EXPECT_NE(metrics.find("not symmetric positive definite"), std::string::npos);
  EXPECT_NE(metrics.find("status = diverged"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
}

TEST(RunCommand, ZeroAmplitudeClassicalHasZeroMetrics) {
  const auto cfg = parse_config("reference.amplitude = 0\nsim.t_end = 2\n");
  const auto report = run_command(cfg, scratch_dir());
  ASSERT_EQ(report.controllers.size(), 1u);
  const auto& m = report.controllers[0].metrics;
  EXPECT_EQ(m.rms, 0.0);
  EXPECT_EQ(m.max_abs, 0.0);
  EXPECT_EQ(m.steady_band.min, 0.0);
  EXPECT_EQ(m.steady_band.max, 0.0);
  EXPECT_EQ(report.files.size(), 6u);
  EXPECT_TRUE(report.verdicts.empty());
}

TEST(RunCommand, UnwritableOutputIsAnIoError) {
  const auto blocker = scratch_dir();
  fs::create_directories(blocker.parent_path());
  std::ofstream(blocker) << "file";
  try {
    run_command(parse_config("sim.t_end = 0.1\n"), blocker / "sub");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
  fs::remove(blocker);
}

TEST(ExitCodes, DistinctAndNonZero) {
  std::set<int> codes = {kExitOk, kExitUsage, kExitSelftestFailed};
  const ErrorKind kinds[] = {ErrorKind::kInvalidPhysics,  ErrorKind::kInvalidArgument,
                             ErrorKind::kConfigSyntax,    ErrorKind::kConfigSemantic,
                             ErrorKind::kScenarioInvalid, ErrorKind::kNotHurwitz,
                             ErrorKind::kNumericalFailure, ErrorKind::kDivergence,
                             ErrorKind::kIo};
  for (ErrorKind k : kinds) {
    EXPECT_NE(exit_code(k), 0);
    EXPECT_TRUE(codes.insert(exit_code(k)).second) << to_string(k);
  }
}

}  // namespace
}  // namespace rotpend::cli
