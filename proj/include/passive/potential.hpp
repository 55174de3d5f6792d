#pragma once

#include "passive/observe.hpp"

#include <span>
#include <vector>

namespace passive {

/// Phi = sum_j (Y_j - G_j)^2 / (2 sigma^2). With sigma = 0 the potential is 0
/// on exact residuals and +inf otherwise.
double misfit(std::span<const double> Y, std::span<const double> G, double sigma_eta);

/// Negative log-likelihood of a fixed observation set. One paired forward
/// solve per evaluation, shared by every data value.
class Potential {
public:
  Potential(ObservationSet obs, ICPair ics, SolverConfig config, bool allow_degenerate = false);

  double operator()(const FourierVelocityField& v) const;
  /// G_j(v) for the observed data values.
  std::vector<double> predictions(const FourierVelocityField& v) const;

  const ObservationSet& observations() const { return obs_; }
  const ForwardModel& model() const { return model_; }
  bool empty() const { return obs_.size() == 0; }

private:
  ObservationSet obs_;
  ForwardModel model_;
};

double potential(const FourierVelocityField& v, const ObservationSet& obs, const ICPair& ics, const SolverConfig& config);

} // namespace passive
