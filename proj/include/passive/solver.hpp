#pragma once

#include "passive/fields.hpp"

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace passive {

enum class Scheme { integrating_factor_rk4 };

struct SolverConfig {
  double kappa = 0.05;
  double T = 1.0;
  double dt_max = 1.0 / 64;
  int K = 16;       ///< solver truncation for the scalar
  int grid_n = 0;   ///< dealiasing grid; 0 selects the smallest exact size
  double checkpoint_spacing = 0.0;  ///< h_chk; 0 selects T/64
  Scheme scheme = Scheme::integrating_factor_rk4;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  /// Grid size used for a velocity of truncation K_v: grid_n if set, else
  /// the smallest even n with n >= 2K + K_v + 1 (exact 2/3-rule dealiasing).
  int effective_grid(int K_v) const;
  double effective_checkpoint_spacing() const;
};

struct Snapshot {
  double t = 0.0;
  FourierScalarField theta;
};

struct ScalarTrajectory {
  SolverConfig config;
  std::string ic_id;
  double h_chk = 0.0;
  double dt_used = 0.0;   ///< step bound after the CFL check
  int grid_used = 0;
  std::vector<Snapshot> snapshots;

  std::vector<double> times() const;
  /// Snapshot at exactly t; throws if absent.
  const FourierScalarField& at(double t) const;
};

struct TrajectoryPair {
  ScalarTrajectory first;
  ScalarTrajectory second;
};

/// Receives each target time in increasing order with the spectral state.
using SnapshotVisitor = std::function<void(std::size_t target, double t, std::span<const Complex> theta)>;

/// Integrates the advection-diffusion equation and reports the state at
/// every target time (sorted, in [0,T]); stepping is clipped so each target
/// is hit exactly. Returns the number of steps taken.
std::size_t integrate(const FourierVelocityField& v, const FourierScalarField& theta0, const SolverConfig& config,
                      std::span<const double> targets, const SnapshotVisitor& visit);

/// Full trajectory: snapshots at all checkpoints (multiples of h_chk, plus T)
/// and every required time.
ScalarTrajectory solve(const FourierVelocityField& v, const FourierScalarField& theta0, const SolverConfig& config,
                       std::span<const double> required_times = {}, std::string ic_id = "theta0");

struct ICPair {
  FourierScalarField first;
  FourierScalarField second;
  std::string id = "custom";

  ICPair swapped() const { return {second, first, id + "/swapped"}; }
};

TrajectoryPair paired_solve(const FourierVelocityField& v, const ICPair& ics, const SolverConfig& config,
                            std::span<const double> required_times = {});

struct EnergyRecord {
  double t = 0.0;
  double l2_sq = 0.0;
  double dissipation_integral = 0.0;  ///< 2 kappa int_0^t |grad theta|^2
  double residual = 0.0;
};

/// Energy balance |theta(t)|^2 + 2 kappa int |grad theta|^2 - |theta0|^2
/// with trapezoidal time quadrature over the stored snapshots.
std::vector<EnergyRecord> energy_report(const ScalarTrajectory& traj);

/// Space-time L2 distance between paired trajectories: spatial integrals by
/// Parseval, temporal integral by the trapezoid rule on shared snapshots.
/// `stride` uses every stride-th snapshot (for quadrature error estimates).
double paired_distance_L2(const TrajectoryPair& a, const TrajectoryPair& b, std::size_t stride = 1);
double distance_L2(const ScalarTrajectory& a, const ScalarTrajectory& b, std::size_t stride = 1);

/// Largest grid |theta| over all snapshots (sampled on an n x n grid).
double trajectory_sup(const ScalarTrajectory& traj, int n = 64);

} // namespace passive
