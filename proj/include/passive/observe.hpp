#pragma once

#include "passive/fields.hpp"
#include "passive/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace passive {

struct SpaceTimePoint {
  double t = 0.0;
  Point x;
};

struct ObservationDesign {
  std::vector<SpaceTimePoint> points;
  std::uint64_t seed = 0;
  double T = 1.0;
};

/// N points i.i.d. uniform on [0,T] x [0,1]^2, drawn from the "design"
/// stream of `seed`.
ObservationDesign sample_design(std::size_t N, double T, std::uint64_t seed);

/// How data values map onto design points. `same_point` observes both
/// initial conditions at every point (values 2j-1 and 2j share point j);
/// `alternate` observes one initial condition per point, alternating.
enum class DataLayout { same_point, alternate };

struct ObservationSet {
  ObservationDesign design;
  DataLayout layout = DataLayout::same_point;
  std::vector<double> G_true;
  std::vector<double> Y;
  double sigma_eta = 0.0;
  std::uint64_t noise_seed = 0;

  std::size_t size() const { return Y.size(); }
  std::size_t point_of(std::size_t j) const { return layout == DataLayout::same_point ? j / 2 : j; }
  /// 1 for the first initial condition (odd 1-based index), 2 for the second.
  int ic_of(std::size_t j) const { return j % 2 == 0 ? 1 : 2; }
  /// The first n data values together with the design points they use.
  ObservationSet prefix(std::size_t n) const;
};

inline std::size_t data_count(std::size_t points, DataLayout layout) {
  return layout == DataLayout::same_point ? 2 * points : points;
}

struct SpanningReport {
  double min_abs = 0.0;
  double max_abs = 0.0;
  double fraction_below = 0.0;  ///< fraction of grid nodes with |d| < tol
  double max_fraction = 0.0;    ///< threshold used for pass
  bool pass = false;
};

struct SpanningOptions {
  double tol_rel = 1e-2;  ///< tol = tol_rel * max|d|
  int zero_curves = 4;    ///< allowance: 4/grid_n grid fraction per zero curve
};

/// Evaluates d(x) = (grad theta0_1)^perp . grad theta0_2 on a grid_n^2 grid.
SpanningReport check_spanning(const ICPair& ics, int grid_n = 64, SpanningOptions opts = {});

/// Parameter-to-observable map for a fixed design and initial condition pair.
/// Construction checks the spanning condition unless `allow_degenerate`.
class ForwardModel {
public:
  ForwardModel(ObservationDesign design, ICPair ics, SolverConfig config,
               DataLayout layout = DataLayout::same_point, bool allow_degenerate = false);

  /// G_j(v) for every data value, interleaved as described by the layout.
  std::vector<double> operator()(const FourierVelocityField& v) const;
  /// Same, restricted to the first n data values (fewer solver targets).
  std::vector<double> prefix(const FourierVelocityField& v, std::size_t n) const;

  const ObservationDesign& design() const { return design_; }
  const ICPair& ics() const { return ics_; }
  const SolverConfig& config() const { return config_; }
  DataLayout layout() const { return layout_; }
  std::size_t size() const { return data_count(design_.points.size(), layout_); }

private:
  ObservationDesign design_;
  ICPair ics_;
  SolverConfig config_;
  DataLayout layout_;
  std::vector<std::size_t> order_;  // point indices sorted by time
};

std::vector<double> forward_map(const FourierVelocityField& v, const ObservationDesign& design, const ICPair& ics,
                                const SolverConfig& config, bool allow_degenerate = false);

/// Y_j = G_j(v_star) + eta_j with eta_j ~ N(0, sigma_eta^2) from the "noise"
/// stream of noise_seed.
ObservationSet synthesize_data(const FourierVelocityField& v_star, const ObservationDesign& design, const ICPair& ics,
                               double sigma_eta, std::uint64_t noise_seed, const SolverConfig& config,
                               DataLayout layout = DataLayout::same_point, bool allow_degenerate = false);
ObservationSet synthesize_data(const ForwardModel& model, const FourierVelocityField& v_star, double sigma_eta,
                               std::uint64_t noise_seed);

// Named initial conditions.
FourierScalarField sine_x1();           ///< sin(2 pi x1)
FourierScalarField sine_x2();           ///< sin(2 pi x2)
FourierScalarField sine_diagonal();     ///< sin(2 pi (x1 + x2))
ICPair canonical_ic_pair();             ///< (sin 2 pi x1, sin 2 pi x2)
ICPair ic_pair_preset(const std::string& name);

} // namespace passive
