#pragma once

#include "passive/potential.hpp"
#include "passive/prior.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace passive {

struct QuadratureOptions {
  int grid_per_dim = 33;  ///< >= 17
  int max_levels = 6;     ///< zoom refinements after the first grid
  double log_cut = 36.0;  ///< cells below max log-weight - log_cut are dropped when zooming
  bool zoom = true;
  double min_shrink = 0.75; ///< zoom only when some side shrinks below this fraction
  int threads = 1;
};

/// Posterior on a tensor-product midpoint grid. Weights are normalized; the
/// mass lost by zooming is reported in `discarded_mass`.
struct QuadratureResult {
  ParameterFamily family;
  std::vector<std::vector<double>> nodes;
  std::vector<double> phi;            ///< potential at each node
  std::vector<double> weights;        ///< posterior weights, sum 1
  std::vector<double> prior_weights;  ///< prior mass of each node's cell
  std::vector<double> lo, hi;         ///< final grid box
  double log_normalizer = 0.0;        ///< log Z = log E_prior[exp(-Phi)]
  double normalizer = 0.0;
  double discarded_mass = 0.0;
  double prior_mass_outside = 0.0;    ///< prior mass not covered by the final grid
  int levels = 0;
  std::size_t evaluations = 0;

  std::vector<double> mean() const;
  /// Posterior mass of {||v - center||_s <= radius}.
  double ball_mass(std::span<const double> center, double radius, SobolevIndex s) const;
  double mass_where(const std::function<bool(std::span<const double>)>& pred) const;
  /// Prior mass of a set, over the final grid.
  double prior_mass_where(const std::function<bool(std::span<const double>)>& pred) const;
  /// Total-variation distance between posterior and prior on the grid.
  double tv_to_prior() const;
};

using CoordPotential = std::function<double(std::span<const double>)>;

/// Brute-force oracle: weights prior density x exp(-Phi) over the prior's
/// bounding box. Throws BudgetError for more than 4 coordinates and
/// ConfigError for grid_per_dim < 17.
QuadratureResult quadrature_posterior(const PriorSpec& spec, const CoordPotential& phi, QuadratureOptions opts = {});
QuadratureResult quadrature_posterior(const PriorSpec& spec, const Potential& pot, QuadratureOptions opts = {});

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// processed exactly once; callers write results into slot i.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

struct BallQuery {
  std::string center_id;
  std::vector<double> center;
  double radius = 0.0;
  SobolevIndex norm;
};

/// JSON report: normalizer, mean[], ball_masses[{center_id,radius,norm,mass}].
std::string quadrature_report_json(const QuadratureResult& q, std::span<const BallQuery> balls);

} // namespace passive
