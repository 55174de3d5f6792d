#pragma once

#include "passive/family.hpp"
#include "passive/rng.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace passive {

enum class PriorKind {
  uniform_ball,        ///< uniform on the V-ball, in coordinates
  truncated_gaussian,  ///< N(center, diag tau^2) conditioned on the V-ball
};

/// Prior supported on the closed ball ||v - center||_V <= radius. Bounded
/// support makes the tail condition on posterior V-moments hold trivially.
struct PriorSpec {
  ParameterFamily family;
  PriorKind kind = PriorKind::uniform_ball;
  double radius = 1.0;
  std::vector<double> center;  ///< coordinates; empty means 0
  double tau0 = 1.0;
  double alpha = 4.5;
  SobolevScale sobolev;

  /// Throws ConfigError; requires alpha > m_star + 1 for the Gaussian kind.
  void validate() const;
  std::size_t dim() const { return family.dim(); }
  std::vector<double> center_coords() const;
  /// Per-coordinate standard deviations tau0 |k_i|^{-alpha}.
  std::vector<double> tau() const;
  double v_distance(std::span<const double> coords) const;
  bool in_support(std::span<const double> coords) const;
  /// Unnormalized log density in coordinates (-inf off the support).
  double log_density(std::span<const double> coords) const;
  /// Axis-aligned bounding box of the support.
  std::pair<std::vector<double>, std::vector<double>> box() const;
};

/// Precomputed geometry for sampling from a PriorSpec.
class PriorSampler {
public:
  explicit PriorSampler(PriorSpec spec);

  const PriorSpec& spec() const { return spec_; }
  /// One prior draw, in coordinates. Throws NumericError when the Gaussian
  /// kind rejects more than 99.9% of 1e5 proposals.
  std::vector<double> sample_coords(Philox& rng);
  FourierVelocityField sample(Philox& rng) { return spec_.family.velocity(sample_coords(rng)); }

  /// Uniform kind only: standard Gaussian latent z <-> uniform ball point.
  std::vector<double> from_latent(std::span<const double> z) const;
  std::vector<double> to_latent(std::span<const double> coords) const;

  std::size_t tries() const { return tries_; }
  std::size_t accepts() const { return accepts_; }

private:
  PriorSpec spec_;
  Eigen::MatrixXd chol_upper_inv_;  // L^{-T}, with G_V = L L^T
  Eigen::MatrixXd chol_upper_;      // L^T
  std::vector<double> tau_;
  std::size_t tries_ = 0;
  std::size_t accepts_ = 0;
};

FourierVelocityField sample_prior(const PriorSpec& spec, Philox& rng);

} // namespace passive
