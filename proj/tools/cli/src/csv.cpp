#include "rotpend/cli/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include <fmt/format.h>

#include "rotpend/errors.hpp"

namespace rotpend::cli {

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  if (traj.empty()) throw Error(ErrorKind::kInvalidArgument, "empty trajectory");
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kCsvHeader);
  for (const auto& s : traj.samples) {
    fmt::format_to(std::back_inserter(buf),
                   "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},"
                   "{:.17g},{}\n",
                   s.t, s.x.x1, s.x.x2, s.x.x3, s.x.x4, s.u, s.ym, s.e, s.theta_f_norm,
                   s.theta_g_norm, s.clamp ? 1 : 0);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", path));
  write_trajectory_csv(out, traj);
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, fmt::format("write to '{}' failed", path));
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorKind::kIo, "trajectory CSV: missing or unexpected header");
  }
  Trajectory traj;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<double, 11> v{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto [next, ec] = std::from_chars(p, end, v[i]);
      const bool last = i + 1 == v.size();
      if (ec != std::errc() || (last ? next != end : (next == end || *next != ','))) {
        throw Error(ErrorKind::kIo, fmt::format("trajectory CSV: bad field {} on line {}",
                                                i + 1, lineno));
      }
      p = last ? next : next + 1;
    }
    Sample s;
    s.t = v[0];
    s.x = {v[1], v[2], v[3], v[4]};
    s.u = v[5];
    s.ym = v[6];
    s.e = v[7];
    s.theta_f_norm = v[8];
    s.theta_g_norm = v[9];
    s.clamp = v[10] != 0.0;
    traj.samples.push_back(s);
  }
  return traj;
}

}  // namespace rotpend::cli
