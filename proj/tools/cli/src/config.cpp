#include "rotpend/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "rotpend/errors.hpp"

namespace rotpend::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ',' || std::isspace(static_cast<unsigned char>(s[i])))) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ',' && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_uint(std::string_view s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

bool valid_key(std::string_view k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

struct Field {
  std::string key;
  std::string value;
  int line = 0;  // 0 for command-line overrides
};

[[noreturn]] void semantic(const Field& f, const std::string& what) {
  std::string msg = f.key + ": " + what;
  if (f.line > 0) msg += fmt::format(" (line {})", f.line);
  throw Error(ErrorKind::kConfigSemantic, msg);
}

double number(const Field& f) {
  const auto v = to_double(f.value);
  if (!v) semantic(f, fmt::format("expected a number, got '{}'", f.value));
  return *v;
}

std::vector<double> numbers(const Field& f) {
  std::vector<double> out;
  for (auto tok : split_list(f.value)) {
    const auto v = to_double(tok);
    if (!v) semantic(f, fmt::format("expected a number, got '{}'", tok));
    out.push_back(*v);
  }
  if (out.empty()) semantic(f, "expected at least one number");
  return out;
}

std::vector<double> numbers(const Field& f, std::size_t count) {
  auto out = numbers(f);
  if (out.size() != count) {
    semantic(f, fmt::format("expected {} numbers, got {}", count, out.size()));
  }
  return out;
}

bool boolean(const Field& f) {
  if (f.value == "true" || f.value == "yes" || f.value == "1") return true;
  if (f.value == "false" || f.value == "no" || f.value == "0") return false;
  semantic(f, fmt::format("expected true or false, got '{}'", f.value));
}

template <class Enum, std::size_t N>
Enum choice(const Field& f, const std::array<Enum, N>& options) {
  std::vector<std::string_view> names;
  for (Enum e : options) {
    if (to_string(e) == f.value) return e;
    names.push_back(to_string(e));
  }
  semantic(f, fmt::format("expected one of {}, got '{}'", fmt::join(names, "|"), f.value));
}

using Setter = std::function<void(ScenarioConfig&, const Field&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const auto table = [] {
    std::map<std::string, Setter, std::less<>> t;

    for (PhysicalParam p : kAllPhysicalParams) {
      t["plant." + std::string(to_string(p))] = [p](ScenarioConfig& c, const Field& f) {
        c.plant.set(p, number(f));
      };
    }

    t["reference.amplitude"] = [](ScenarioConfig& c, const Field& f) {
      c.reference.amplitude = number(f);
    };
    t["reference.frequency"] = [](ScenarioConfig& c, const Field& f) {
      c.reference.frequency = number(f);
    };

    t["controller.type"] = [](ScenarioConfig& c, const Field& f) {
      c.controller = choice(f, std::array{ControllerType::kClassical, ControllerType::kAdaptive});
    };
    t["controller.kd"] = [](ScenarioConfig& c, const Field& f) { c.fl.kd = number(f); };
    t["controller.kp"] = [](ScenarioConfig& c, const Field& f) { c.fl.kp = number(f); };
    t["controller.K"] = [](ScenarioConfig& c, const Field& f) { c.adaptive.K = numbers(f); };
    t["controller.gamma1"] = [](ScenarioConfig& c, const Field& f) {
      c.adaptive.gamma1 = number(f);
    };
    t["controller.gamma2"] = [](ScenarioConfig& c, const Field& f) {
      c.adaptive.gamma2 = number(f);
    };
    t["controller.Q"] = [](ScenarioConfig& c, const Field& f) { c.adaptive.Q = numbers(f); };
    t["controller.g_floor"] = [](ScenarioConfig& c, const Field& f) {
      c.adaptive.g_floor = number(f);
    };
    t["controller.theta_cap"] = [](ScenarioConfig& c, const Field& f) {
      c.adaptive.theta_cap = number(f);
    };
    t["controller.p_mode"] = [](ScenarioConfig& c, const Field& f) {
      c.adaptive.p_mode = choice(f, std::array{PMode::kSolved, PMode::kPaperMatrix});
    };
    t["controller.error_mode"] = [](ScenarioConfig& c, const Field& f) {
      c.adaptive.error_mode = choice(f, std::array{ErrorMode::kIntegral, ErrorMode::kDerivative});
    };
    const char* axes[] = {"x2", "x3", "x4"};
    for (std::size_t i = 0; i < 3; ++i) {
      t[std::string("controller.") + axes[i] + "_range"] = [i](ScenarioConfig& c,
                                                               const Field& f) {
        const auto v = numbers(f, 2);
        c.fuzzy.axes[i].lo = v[0];
        c.fuzzy.axes[i].hi = v[1];
      };
    }
    t["controller.centers"] = [](ScenarioConfig& c, const Field& f) {
      std::vector<std::size_t> counts;
      for (auto tok : split_list(f.value)) {
        const auto v = to_uint(tok);
        if (!v) semantic(f, fmt::format("expected a whole number, got '{}'", tok));
        counts.push_back(static_cast<std::size_t>(*v));
      }
      if (counts.size() == 1) counts.assign(3, counts.front());
      if (counts.size() != 3) semantic(f, "expected 1 or 3 counts");
      for (std::size_t i = 0; i < 3; ++i) c.fuzzy.axes[i].centers = counts[i];
    };

    t["sim.dt"] = [](ScenarioConfig& c, const Field& f) { c.dt = number(f); };
    t["sim.t_end"] = [](ScenarioConfig& c, const Field& f) { c.t_end = number(f); };
    t["sim.x0"] = [](ScenarioConfig& c, const Field& f) {
      const auto v = numbers(f, 4);
      c.x0 = {v[0], v[1], v[2], v[3]};
    };
    t["sim.measurement"] = [](ScenarioConfig& c, const Field& f) {
      c.measurement = choice(
          f, std::array{MeasurementMode::kTrueState, MeasurementMode::kBackwardDifference});
    };
    t["sim.seed"] = [](ScenarioConfig& c, const Field& f) {
      const auto v = to_uint(f.value);
      if (!v) semantic(f, fmt::format("expected a whole number, got '{}'", f.value));
      c.seed = *v;
    };
    t["sim.compare"] = [](ScenarioConfig& c, const Field& f) { c.compare = boolean(f); };
    t["sim.settle_threshold"] = [](ScenarioConfig& c, const Field& f) {
      c.settle_threshold = number(f);
    };
    // sim.uncertainty is handled after the schedule so its events come last.
    return t;
  }();
  return table;
}

bool known_section(std::string_view name) {
  if (name == "plant" || name == "reference" || name == "controller" || name == "sim") {
    return true;
  }
  constexpr std::string_view prefix = "schedule.";
  return name.starts_with(prefix) && to_uint(name.substr(prefix.size())).value_or(0) > 0;
}

struct PendingEvent {
  std::optional<Field> line;
  std::map<std::string, Field> fields;
};

ScheduleEvent build_event(std::uint64_t n, const PendingEvent& p) {
  if (p.line && !p.fields.empty()) {
    semantic(p.fields.begin()->second,
             fmt::format("schedule.{} is defined both as a one-line event and by fields", n));
  }
  if (p.line) {
    try {
      return parse_schedule_event(p.line->value);
    } catch (const Error& e) {
      semantic(*p.line, e.what());
    }
  }

  ScheduleEvent ev;
  auto get = [&](const char* name) -> const Field* {
    const auto it = p.fields.find(name);
    return it == p.fields.end() ? nullptr : &it->second;
  };
  for (const auto& [name, f] : p.fields) {
    static const std::array<std::string_view, 6> allowed = {"kind", "param", "magnitude",
                                                            "start", "end", "period"};
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      semantic(f, "unknown key");
    }
  }
  const Field* kind = get("kind");
  const Field* param = get("param");
  const Field* magnitude = get("magnitude");
  const Field& any = p.fields.begin()->second;
  if (!kind) semantic(any, fmt::format("schedule.{} needs a kind", n));
  if (!param) semantic(any, fmt::format("schedule.{} needs a param", n));
  if (!magnitude) semantic(any, fmt::format("schedule.{} needs a magnitude", n));
  ev.kind = choice(*kind, std::array{ScheduleKind::kStep, ScheduleKind::kRamp, ScheduleKind::kSine});
  const auto target = parse_physical_param(param->value);
  if (!target) semantic(*param, fmt::format("unknown plant parameter '{}'", param->value));
  ev.target = *target;
  ev.magnitude = number(*magnitude);
  if (const Field* f = get("start")) ev.start = number(*f);
  if (const Field* f = get("end")) ev.end = number(*f);
  if (const Field* f = get("period")) ev.period = number(*f);
  return ev;
}

std::string num(double v) { return fmt::format("{}", v); }

std::string num_list(const std::vector<double>& v) {
  std::vector<std::string> parts;
  for (double x : v) parts.push_back(num(x));
  return fmt::format("{}", fmt::join(parts, ", "));
}

}  // namespace

ScheduleEvent parse_schedule_event(std::string_view text) {
  const auto tok = split_list(text);
  auto bad = [&]() -> Error {
    return Error(ErrorKind::kConfigSemantic,
                 fmt::format("cannot read schedule event '{}'; expected 'step <param> <x> at "
                             "<t>', 'ramp <param> <x> from <t0> to <t1>' or 'sine <param> "
                             "<amp> period <T> [from <t0>]'",
                             trim(text)));
  };
  auto real = [&](std::size_t i) {
    const auto v = to_double(tok.at(i));
    if (!v) throw bad();
    return *v;
  };
  if (tok.size() < 3) throw bad();

  ScheduleEvent ev;
  const auto target = parse_physical_param(tok[1]);
  if (!target) {
    throw Error(ErrorKind::kConfigSemantic,
                fmt::format("unknown plant parameter '{}'", tok[1]));
  }
  ev.target = *target;
  ev.magnitude = real(2);

  if (tok[0] == "step" && tok.size() == 5 && tok[3] == "at") {
    ev.kind = ScheduleKind::kStep;
    ev.start = real(4);
  } else if (tok[0] == "ramp" && tok.size() == 7 && tok[3] == "from" && tok[5] == "to") {
    ev.kind = ScheduleKind::kRamp;
    ev.start = real(4);
    ev.end = real(6);
  } else if (tok[0] == "sine" && (tok.size() == 5 || tok.size() == 7) && tok[3] == "period") {
    ev.kind = ScheduleKind::kSine;
    ev.period = real(4);
    if (tok.size() == 7) {
      if (tok[5] != "from") throw bad();
      ev.start = real(6);
    }
  } else {
    throw bad();
  }
  return ev;
}

ScenarioConfig parse_config(std::string_view text, const Overrides& overrides) {
  std::map<std::string, Field> entries;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigSyntaxError(lineno, "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!valid_key(name)) throw ConfigSyntaxError(lineno, "bad section name");
      if (!known_section(name)) {
        throw Error(ErrorKind::kConfigSemantic,
                    fmt::format("unknown section [{}] (line {})", name, lineno));
      }
      section = name;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigSyntaxError(lineno, fmt::format("expected 'key = value', got '{}'", line));
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigSyntaxError(lineno, fmt::format("bad key '{}'", key));
    if (value.empty()) throw ConfigSyntaxError(lineno, fmt::format("missing value for '{}'", key));

    // Dotted keys are absolute even inside a section.
    std::string full = section.empty() || key.find('.') != std::string_view::npos
                           ? std::string(key)
                           : section + "." + std::string(key);
    if (const auto it = entries.find(full); it != entries.end()) {
      throw Error(ErrorKind::kConfigSemantic,
                  fmt::format("{}: duplicate key (lines {} and {})", full, it->second.line,
                              lineno));
    }
    entries.emplace(full, Field{full, std::string(value), lineno});
  }
  for (const auto& [k, v] : overrides) entries[k] = Field{k, v, 0};

  ScenarioConfig cfg;
  if (const auto it = entries.find("controller.preset"); it != entries.end()) {
    const Field& f = it->second;
    if (f.value == "stable") {
      cfg.adaptive = AdaptiveControllerConfig::stable();
    } else if (f.value == "paper") {
      cfg.adaptive = AdaptiveControllerConfig::paper();
    } else {
      semantic(f, fmt::format("expected stable or paper, got '{}'", f.value));
    }
    cfg.preset = f.value;
    entries.erase(it);
  }

  bool uncertainty = false;
  std::map<std::uint64_t, PendingEvent> pending;
  const auto& table = setters();
  for (const auto& [key, f] : entries) {
    if (key == "sim.uncertainty") {
      uncertainty = boolean(f);
      continue;
    }
    if (key.starts_with("schedule.")) {
      const std::string_view rest = std::string_view(key).substr(9);
      const auto dot = rest.find('.');
      const auto n = to_uint(rest.substr(0, dot));
      if (!n || *n == 0) semantic(f, "unknown key");
      if (dot == std::string_view::npos) {
        pending[*n].line = f;
      } else {
        pending[*n].fields.emplace(std::string(rest.substr(dot + 1)), f);
      }
      continue;
    }
    const auto it = table.find(key);
    if (it == table.end()) semantic(f, "unknown key");
    it->second(cfg, f);
  }

  for (const auto& [n, p] : pending) cfg.schedule.events.push_back(build_event(n, p));
  if (uncertainty) {
    for (const auto& ev : default_uncertainty_schedule().events) {
      cfg.schedule.events.push_back(ev);
    }
  }

  cfg.validate();
  return cfg;
}

std::string to_config_text(const ScenarioConfig& c) {
  std::string out;
  auto kv = [&out](std::string_view k, const std::string& v) {
    out += fmt::format("{} = {}\n", k, v);
  };

  out += "[controller]\n";
  kv("type", std::string(to_string(c.controller)));
  kv("preset", c.preset);
  kv("kd", num(c.fl.kd));
  kv("kp", num(c.fl.kp));
  kv("K", num_list(c.adaptive.K));
  kv("gamma1", num(c.adaptive.gamma1));
  kv("gamma2", num(c.adaptive.gamma2));
  kv("Q", num_list(c.adaptive.Q));
  kv("g_floor", num(c.adaptive.g_floor));
  kv("theta_cap", num(c.adaptive.theta_cap));
  kv("p_mode", std::string(to_string(c.adaptive.p_mode)));
  kv("error_mode", std::string(to_string(c.adaptive.error_mode)));
  const char* axes[] = {"x2", "x3", "x4"};
  for (std::size_t i = 0; i < 3; ++i) {
    kv(std::string(axes[i]) + "_range", num_list({c.fuzzy.axes[i].lo, c.fuzzy.axes[i].hi}));
  }
  kv("centers", fmt::format("{}, {}, {}", c.fuzzy.axes[0].centers, c.fuzzy.axes[1].centers,
                            c.fuzzy.axes[2].centers));

  out += "\n[plant]\n";
  for (PhysicalParam p : kAllPhysicalParams) kv(to_string(p), num(c.plant.get(p)));

  out += "\n[reference]\n";
  kv("amplitude", num(c.reference.amplitude));
  kv("frequency", num(c.reference.frequency));

  out += "\n[sim]\n";
  kv("dt", num(c.dt));
  kv("t_end", num(c.t_end));
  kv("x0", num_list({c.x0.x1, c.x0.x2, c.x0.x3, c.x0.x4}));
  kv("measurement", std::string(to_string(c.measurement)));
  kv("seed", std::to_string(c.seed));
  kv("compare", c.compare ? "true" : "false");
  kv("settle_threshold", num(c.settle_threshold));

  for (std::size_t i = 0; i < c.schedule.events.size(); ++i) {
    const auto& ev = c.schedule.events[i];
    out += fmt::format("\n[schedule.{}]\n", i + 1);
    kv("kind", std::string(to_string(ev.kind)));
    kv("param", std::string(to_string(ev.target)));
    kv("magnitude", num(ev.magnitude));
    kv("start", num(ev.start));
    kv("end", num(ev.end));
    kv("period", num(ev.period));
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::kIo, fmt::format("cannot read '{}'", path));
  return ss.str();
}

}  // namespace rotpend::cli
