#pragma once

#include "passive/fields.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace passive {

/// Finite-dimensional linear parameterization v(c) = sum_i c_i phi_i of
/// divergence-free velocities. Samplers and quadrature work in coordinates.
class ParameterFamily {
public:
  ParameterFamily() = default;
  /// `mode_norms[i]` is the |k| the i-th basis field lives on (drives prior decay).
  ParameterFamily(std::string name, std::vector<FourierVelocityField> basis, std::vector<double> mode_norms);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return basis_.size(); }
  int K() const { return K_; }
  const std::vector<FourierVelocityField>& basis() const { return basis_; }
  const std::vector<double>& mode_norms() const { return mode_norms_; }

  FourierVelocityField velocity(std::span<const double> coords) const;
  /// H^s Gram matrix <phi_i, phi_j>_s; ||v(c)||_s^2 = c^T G c.
  Eigen::MatrixXd gram(SobolevIndex s) const;
  /// Coordinates of v's projection onto the span (H^0 inner product).
  std::vector<double> coordinates(const FourierVelocityField& v) const;

private:
  std::string name_;
  std::vector<FourierVelocityField> basis_;
  std::vector<double> mode_norms_;
  int K_ = 0;
};

/// u = (cos 2 pi x2, 0)
FourierVelocityField shear_x();
/// u = (0, cos 2 pi x1)
FourierVelocityField shear_y();
/// u = (0, sin 2 pi x1)
FourierVelocityField shear_y_sine();
/// u = (cos 2 pi x2, -cos 2 pi x1); annihilates sin 2 pi x1 + sin 2 pi x2.
FourierVelocityField radial_symmetric_flow();

/// Presets: "shear" (2 coordinates on |k| = 1), "radial" (1), "laminar" (1),
/// "laminar2" (cosine and sine laminar profiles), and "modes" (every real
/// degree of freedom of the K_param lattice).
ParameterFamily family_preset(const std::string& name, int K_param = 1);

/// H^s inner product sum_k |k|^{2s} Re(v_k conj(w_k)).
double inner_product(const FourierVelocityField& v, const FourierVelocityField& w, SobolevIndex s);

} // namespace passive
