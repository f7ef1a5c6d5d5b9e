#include <cstdint>
#include <iostream>
#include <string>

#ifdef ROTPEND_CLI11_PACKAGE
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "rotpend/cli/config.hpp"
#include "rotpend/cli/run.hpp"
#include "rotpend/selftest.hpp"

namespace {

using namespace rotpend;
using namespace rotpend::cli;

int do_run(const std::string& config_path, const std::string& out_dir, bool compare,
           const std::string& preset, const std::string& seed) {
  Overrides ov;
  if (compare) ov["sim.compare"] = "true";
  if (!preset.empty()) {
    ov["controller.type"] = "adaptive";
    ov["controller.preset"] = preset;
  }
  if (!seed.empty()) ov["sim.seed"] = seed;

  const ScenarioConfig cfg = parse_config(read_text_file(config_path), ov);
  const RunReport report = run_command(cfg, out_dir);

  std::cout << report.summary();
  std::cout << "\nwrote:\n";
  for (const auto& p : report.files) std::cout << "  " << p.string() << "\n";

  if (report.diverged()) {
    for (const auto& c : report.controllers) {
      if (c.divergence) {
        std::cerr << "rotpend: " << to_string(c.controller)
                  << " run diverged: " << c.divergence->what() << "\n";
      }
    }
    return exit_code(ErrorKind::kDivergence);
  }
  return kExitOk;
}

int do_selftest(std::uint64_t seed) {
  bool ok = true;
  for (const auto& r : run_acceptance_suite(seed)) {
    std::cout << format_check(r) << "\n";
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitSelftestFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotary inverted pendulum: feedback linearization vs adaptive fuzzy control"};
  app.require_subcommand(1);
  const std::string footer =
      "Exit status: 0 ok, 2 usage, 3 config syntax, 4 config semantic, 5 invalid scenario,\n"
      "6 invalid physics, 7 A not Hurwitz, 8 numerical failure, 9 divergence, 10 I/O,\n"
      "11 invalid argument, 12 selftest failure.\n\n"
      "Scenario defaults (every key may be set in the config file):\n\n" +
      to_config_text(ScenarioConfig{});
  app.footer(footer);

  std::string config_path;
  std::string out_dir = "rotpend_out";
  bool compare = false;
  std::string preset;
  std::string seed;
  auto* run = app.add_subcommand("run", "Simulate a scenario and write CSV, metrics and plots");
  run->footer(footer);
  run->add_option("config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")
      ->envname("ROTPEND_OUT_DIR")
      ->capture_default_str();
  run->add_flag("--compare", compare, "Run classical and adaptive controllers side by side");
  run->add_option("--preset", preset, "Use the adaptive controller with this preset")
      ->check(CLI::IsMember({"paper", "stable"}));
  run->add_option("--seed", seed, "Override sim.seed")->check(CLI::NonNegativeNumber);

  std::uint64_t selftest_seed = kDefaultSelftestSeed;
  auto* selftest = app.add_subcommand("selftest", "Run the invariant and acceptance checks");
  selftest->add_option("--seed", selftest_seed, "Seed for randomized checks")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return do_run(config_path, out_dir, compare, preset, seed);
    return do_selftest(selftest_seed);
  } catch (const NotHurwitzError& e) {
    std::cerr << "rotpend: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const Error& e) {
    std::cerr << "rotpend: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "rotpend: " << e.what() << "\n";
    return 1;
  }
}
