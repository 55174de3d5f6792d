#pragma once

#include "passive/prior.hpp"
#include "passive/quadrature.hpp"

#include <span>
#include <string>
#include <vector>

namespace passive {

struct PcnOptions {
  double beta = 0.2;            ///< in [0, 1]
  std::size_t n_steps = 1000;   ///< recorded after burn-in
  std::size_t burn_in = 0;
  bool adapt = true;            ///< tune beta during burn-in only
  std::size_t adapt_interval = 50;
  double target_low = 0.2;
  double target_high = 0.4;
};

struct ChainStep {
  std::vector<double> coords;
  double phi = 0.0;
  bool accepted = false;
};

struct ChainState {
  std::vector<double> coords;
  double phi = 0.0;
  std::size_t steps = 0;
  std::size_t accepts = 0;
  double beta = 0.0;

  /// True when the stored potential matches a fresh evaluation.
  bool verify(const CoordPotential& phi_fn, double tol = 0.0) const;
};

struct ChainResult {
  std::vector<ChainStep> trace;  ///< burn-in steps first, then recorded steps
  std::size_t burn_in = 0;
  ChainState state;
  std::size_t support_rejections = 0;

  double acceptance_rate() const;  ///< over recorded steps
  std::vector<double> mean() const;
  /// Batch-means standard error of each coordinate's mean.
  std::vector<double> standard_error(std::size_t batches = 20) const;
};

/// Preconditioned Crank-Nicolson chain. Gaussian-kind priors propose
/// x' = c + sqrt(1 - beta^2)(x - c) + beta tau xi and reject moves leaving the
/// V-ball. Uniform-kind priors run the same proposal on a standard Gaussian
/// latent variable mapped onto the ball, so no move is ever rejected by the
/// prior. Acceptance uses min(1, exp(Phi(x) - Phi(x'))) with the difference
/// clamped to [-700, 700].
ChainResult pcn_chain(const PriorSpec& spec, const CoordPotential& phi, PcnOptions opts, Philox& rng,
                      std::span<const double> init);
ChainResult pcn_chain(const PriorSpec& spec, const Potential& pot, PcnOptions opts, Philox& rng,
                      std::span<const double> init);

/// CSV `step,accepted,phi,p0,p1,...`.
std::string chain_trace_csv(const ChainResult& chain);

} // namespace passive
