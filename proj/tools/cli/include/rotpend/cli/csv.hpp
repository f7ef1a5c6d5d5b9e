#pragma once

#include <iosfwd>
#include <string>

#include "rotpend/sim.hpp"

namespace rotpend::cli {

inline constexpr const char* kCsvHeader =
    "t,x1,x2,x3,x4,u,ym,e,theta_f_norm,theta_g_norm,clamp";

/// One row per sample, 17 significant digits, LF line endings. Throws
/// Error(kInvalidArgument) for an empty trajectory.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// Reads what write_trajectory_csv wrote. Schedule multipliers are not
/// stored and come back as 1. Throws Error(kIo) on malformed input.
Trajectory read_trajectory_csv(std::istream& in);

}  // namespace rotpend::cli
