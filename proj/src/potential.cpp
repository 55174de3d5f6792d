#include "passive/potential.hpp"

#include "passive/errors.hpp"

#include <limits>

namespace passive {

double misfit(std::span<const double> Y, std::span<const double> G, double sigma_eta) {
  if (Y.size() != G.size())
    throw std::invalid_argument("misfit: data and predictions differ in length");
  double ss = 0.0;
  for (std::size_t j = 0; j < Y.size(); ++j) {
    const double r = Y[j] - G[j];
    ss += r * r;
  }
  if (sigma_eta == 0.0)
    return ss == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return ss / (2.0 * sigma_eta * sigma_eta);
}

Potential::Potential(ObservationSet obs, ICPair ics, SolverConfig config, bool allow_degenerate)
    : obs_(std::move(obs)),
      model_(obs_.design, std::move(ics), std::move(config), obs_.layout, allow_degenerate) {
  if (obs_.size() > model_.size())
    throw ConfigError("observation set has more values than its design supports");
  if (obs_.sigma_eta < 0.0)
    throw ConfigError("sigma_eta must be nonnegative");
}

std::vector<double> Potential::predictions(const FourierVelocityField& v) const {
  if (empty())
    return {};
  return model_.prefix(v, obs_.size());
}

double Potential::operator()(const FourierVelocityField& v) const {
  if (empty())
    return 0.0;
  const auto G = predictions(v);
  return misfit(obs_.Y, G, obs_.sigma_eta);
}

double potential(const FourierVelocityField& v, const ObservationSet& obs, const ICPair& ics, const SolverConfig& config) {
  return Potential(obs, ics, config)(v);
}

} // namespace passive
