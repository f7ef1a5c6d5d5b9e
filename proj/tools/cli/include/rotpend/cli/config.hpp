#pragma once

// Line-oriented scenario files.
//
//   # comment
//   [controller]
//   type = adaptive
//   preset = stable
//   [schedule.1]
//   kind = step
//   param = m1
//   ...
//
// Keys may also be written fully qualified (`controller.type = adaptive`,
// `schedule.1 = step m1 1.3 at 10`). A key containing a dot is always taken
// as fully qualified, including inside a section.

#include <map>
#include <string>
#include <string_view>

#include "rotpend/sim.hpp"

namespace rotpend::cli {

/// Extra `section.key = value` pairs that take precedence over the file.
using Overrides = std::map<std::string, std::string>;

/// Throws ConfigSyntaxError, Error(kConfigSemantic) or
/// Error(kScenarioInvalid).
ScenarioConfig parse_config(std::string_view text, const Overrides& overrides = {});

/// Inverse of parse_config: parse_config(to_config_text(c)) == c.
std::string to_config_text(const ScenarioConfig& cfg);

/// One-line event grammar:
///   step <param> <multiplier> at <t>
///   ramp <param> <multiplier> from <t0> to <t1>
///   sine <param> <amplitude> period <T> [from <t0>]
ScheduleEvent parse_schedule_event(std::string_view text);

/// Reads a whole file. Throws Error(kIo).
std::string read_text_file(const std::string& path);

}  // namespace rotpend::cli
