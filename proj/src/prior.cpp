#include "passive/prior.hpp"

#include "passive/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>

namespace passive {

void PriorSpec::validate() const {
  sobolev.validate();
  if (family.dim() == 0)
    throw ConfigError("prior family has no coordinates");
  if (!(radius >= 0.0))
    throw ConfigError("prior radius must be nonnegative");
  if (!center.empty() && center.size() != family.dim())
    throw ConfigError("prior center has the wrong number of coordinates");
  if (!(tau0 > 0.0))
    throw ConfigError("prior tau0 must be positive");
  if (kind == PriorKind::truncated_gaussian && !(alpha > sobolev.m_star + 1.0))
    throw ConfigError("prior alpha must exceed m_star + 1 for the Gaussian kind");
}

std::vector<double> PriorSpec::center_coords() const {
  return center.empty() ? std::vector<double>(family.dim(), 0.0) : center;
}

std::vector<double> PriorSpec::tau() const {
  std::vector<double> t(family.dim());
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = tau0 * std::pow(family.mode_norms()[i], -alpha);
  return t;
}

double PriorSpec::v_distance(std::span<const double> coords) const {
  const auto G = family.gram(sobolev.V());
  const auto c = center_coords();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(Eigen::Index(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i)
    d(Eigen::Index(i)) = coords[i] - c[i];
  return std::sqrt(std::max(0.0, d.dot(G * d)));
}

bool PriorSpec::in_support(std::span<const double> coords) const {
  return v_distance(coords) <= radius * (1.0 + 1e-12);
}

double PriorSpec::log_density(std::span<const double> coords) const {
  if (!in_support(coords))
    return -std::numeric_limits<double>::infinity();
  if (kind == PriorKind::uniform_ball)
    return 0.0;
  const auto t = tau();
  const auto c = center_coords();
  double acc = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i)
    acc -= 0.5 * std::pow((coords[i] - c[i]) / t[i], 2);
  return acc;
}

std::pair<std::vector<double>, std::vector<double>> PriorSpec::box() const {
  const Eigen::MatrixXd Ginv = family.gram(sobolev.V()).inverse();
  const auto c = center_coords();
  std::vector<double> lo(c.size()), hi(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double r = radius * std::sqrt(Ginv(Eigen::Index(i), Eigen::Index(i)));
    lo[i] = c[i] - r;
    hi[i] = c[i] + r;
  }
  return {lo, hi};
}

PriorSampler::PriorSampler(PriorSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const auto G = spec_.family.gram(spec_.sobolev.V());
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw ConfigError("prior family basis is linearly dependent in the V-norm");
  const Eigen::MatrixXd L = llt.matrixL();
  chol_upper_ = L.transpose();
  chol_upper_inv_ = chol_upper_.inverse();
  tau_ = spec_.tau();
}

std::vector<double> PriorSampler::from_latent(std::span<const double> z) const {
  const std::size_t d = spec_.dim();
  const auto c = spec_.center_coords();
  double r2 = 0.0;
  for (double x : z)
    r2 += x * x;
  std::vector<double> out = c;
  if (r2 == 0.0 || spec_.radius == 0.0)
    return out;
  // |z|^2 ~ chi^2_d, so P(d/2, |z|^2/2) is uniform and its d-th root is the
  // radial law of a uniform point in the unit ball
  const double u = boost::math::gamma_p(0.5 * double(d), 0.5 * r2);
  const double rho = spec_.radius * std::pow(u, 1.0 / double(d)) / std::sqrt(r2);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(Eigen::Index(d));
  for (std::size_t i = 0; i < d; ++i)
    y(Eigen::Index(i)) = rho * z[i];
  const Eigen::VectorXd x = chol_upper_inv_ * y;
  for (std::size_t i = 0; i < d; ++i)
    out[i] += x(Eigen::Index(i));
  return out;
}

std::vector<double> PriorSampler::to_latent(std::span<const double> coords) const {
  const std::size_t d = spec_.dim();
  const auto c = spec_.center_coords();
  std::vector<double> z(d, 0.0);
  if (spec_.radius == 0.0)
    return z;
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(Eigen::Index(d));
  for (std::size_t i = 0; i < d; ++i)
    dx(Eigen::Index(i)) = coords[i] - c[i];
  const Eigen::VectorXd y = chol_upper_ * dx / spec_.radius;
  const double rho = y.norm();
  if (rho == 0.0)
    return z;
  const double u = std::pow(std::min(rho, 1.0 - 1e-12), double(d));
  const double r = std::sqrt(2.0 * boost::math::gamma_p_inv(0.5 * double(d), u));
  for (std::size_t i = 0; i < d; ++i)
    z[i] = r * y(Eigen::Index(i)) / rho;
  return z;
}

std::vector<double> PriorSampler::sample_coords(Philox& rng) {
  const std::size_t d = spec_.dim();
  if (spec_.radius == 0.0)
    return spec_.center_coords();
  if (spec_.kind == PriorKind::uniform_ball) {
    std::vector<double> z(d);
    for (auto& x : z)
      x = rng.normal();
    ++tries_;
    ++accepts_;
    return from_latent(z);
  }
  const auto c = spec_.center_coords();
  std::vector<double> x(d);
  for (std::size_t attempt = 0; attempt < 100000; ++attempt) {
    for (std::size_t i = 0; i < d; ++i)
      x[i] = c[i] + tau_[i] * rng.normal();
    ++tries_;
    if (spec_.in_support(x)) {
      ++accepts_;
      return x;
    }
    if (tries_ >= 100000 && double(accepts_) < 1e-3 * double(tries_))
      break;
  }
  throw NumericError("prior rejection rate above 99.9% over 1e5 proposals; increase the V-ball radius or "
                     "decrease tau0");
}

FourierVelocityField sample_prior(const PriorSpec& spec, Philox& rng) {
  PriorSampler s(spec);
  return s.sample(rng);
}

} // namespace passive
