#pragma once

#include "passive/solver.hpp"

#include <string>

namespace passive {

/// Writes snapshot_<i>.csv for every snapshot plus manifest.json (times,
/// kappa, T, dt, grid_n, ic_id) into `dir`, which is created if needed.
void export_trajectory(const std::string& dir, const ScalarTrajectory& traj);
ScalarTrajectory import_trajectory(const std::string& dir);

/// CSV `t,l2_sq,dissipation_integral,residual`.
void export_energy_report(const std::string& path, const std::vector<EnergyRecord>& report);

} // namespace passive
