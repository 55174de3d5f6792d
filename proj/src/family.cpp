#include "passive/family.hpp"

#include "passive/errors.hpp"

#include <cmath>

namespace passive {

ParameterFamily::ParameterFamily(std::string name, std::vector<FourierVelocityField> basis,
                                 std::vector<double> mode_norms)
    : name_(std::move(name)), basis_(std::move(basis)), mode_norms_(std::move(mode_norms)) {
  if (basis_.size() != mode_norms_.size())
    throw ConfigError("family: basis and mode_norms differ in length");
  for (const auto& b : basis_)
    K_ = std::max(K_, b.K());
  for (auto& b : basis_)
    if (b.K() < K_)
      b = b.embedded(K_);
}

FourierVelocityField ParameterFamily::velocity(std::span<const double> coords) const {
  if (coords.size() != dim())
    throw ConfigError("family '" + name_ + "': expected " + std::to_string(dim()) + " coordinates");
  FourierVelocityField v(K_);
  for (std::size_t i = 0; i < dim(); ++i)
    if (coords[i] != 0.0)
      v += coords[i] * basis_[i];
  return v;
}

double inner_product(const FourierVelocityField& v, const FourierVelocityField& w, SobolevIndex s) {
  const int K = std::max(v.K(), w.K());
  const auto a = v.K() == K ? v : v.embedded(K);
  const auto b = w.K() == K ? w : w.embedded(K);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.lattice().size(); ++i)
    acc += std::pow(a.lattice().mode(i).norm_sq(), s.s) * (a.amps()[i] * std::conj(b.amps()[i])).real();
  return acc;
}

Eigen::MatrixXd ParameterFamily::gram(SobolevIndex s) const {
  const auto d = Eigen::Index(dim());
  Eigen::MatrixXd G(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      G(i, j) = G(j, i) = inner_product(basis_[std::size_t(i)], basis_[std::size_t(j)], s);
  return G;
}

std::vector<double> ParameterFamily::coordinates(const FourierVelocityField& v) const {
  const auto G = gram({0.0});
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Eigen::Index(dim()));
  for (std::size_t i = 0; i < dim(); ++i)
    rhs(Eigen::Index(i)) = inner_product(basis_[i], v, {0.0});
  const Eigen::VectorXd c = G.ldlt().solve(rhs);
  return {c.data(), c.data() + c.size()};
}

FourierVelocityField shear_x() {
  FourierVelocityField v(1);
  v.set(0, 1, Complex(-0.5, 0.0));
  return v;
}

FourierVelocityField shear_y() {
  FourierVelocityField v(1);
  v.set(1, 0, Complex(0.5, 0.0));
  return v;
}

FourierVelocityField shear_y_sine() {
  FourierVelocityField v(1);
  v.set(1, 0, Complex(0.0, -0.5));
  return v;
}

FourierVelocityField radial_symmetric_flow() { return shear_x() - shear_y(); }

ParameterFamily family_preset(const std::string& name, int K_param) {
  if (name == "shear")
    return ParameterFamily("shear", {shear_x(), shear_y()}, {1.0, 1.0});
  if (name == "radial")
    return ParameterFamily("radial", {radial_symmetric_flow()}, {1.0});
  if (name == "laminar")
    return ParameterFamily("laminar", {shear_y()}, {1.0});
  if (name == "laminar2")
    return ParameterFamily("laminar2", {shear_y(), shear_y_sine()}, {1.0, 1.0});
  if (name == "modes") {
    if (K_param < 1)
      throw ConfigError("K_param must be >= 1 for the modes family");
    const ModeLattice lattice(K_param);
    std::vector<FourierVelocityField> basis;
    std::vector<double> norms;
    // one representative per conjugate pair: the first half of the enumeration
    for (std::size_t i = 0; i < lattice.size() / 2; ++i) {
      const Mode k = lattice.mode(i);
      FourierVelocityField re(K_param), im(K_param);
      re.set(k.k1, k.k2, Complex(1.0, 0.0));
      im.set(k.k1, k.k2, Complex(0.0, 1.0));
      basis.push_back(std::move(re));
      basis.push_back(std::move(im));
      norms.push_back(std::sqrt(k.norm_sq()));
      norms.push_back(std::sqrt(k.norm_sq()));
    }
    return ParameterFamily("modes", std::move(basis), std::move(norms));
  }
  throw ConfigError("unknown parameter family '" + name + "'");
}

} // namespace passive
