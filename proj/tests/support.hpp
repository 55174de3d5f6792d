#pragma once

#include "passive/fields.hpp"
#include "passive/observe.hpp"
#include "passive/rng.hpp"

#include <cmath>
#include <vector>

namespace testing {

using namespace passive;

inline FourierScalarField random_scalar(int K, std::uint64_t seed, double decay = 2.0) {
  Philox rng(seed, "test-scalar");
  FourierScalarField f(K);
  const ModeLattice& L = f.lattice();
  for (std::size_t i = 0; i < L.size() / 2; ++i) {
    const Mode k = L.mode(i);
    const double a = std::pow(k.norm_sq(), -decay / 2);
    f.set(k.k1, k.k2, Complex(a * rng.normal(), a * rng.normal()));
  }
  return f;
}

inline FourierVelocityField random_velocity(int K, std::uint64_t seed, double scale = 1.0, double decay = 2.0) {
  Philox rng(seed, "test-velocity");
  FourierVelocityField v(K);
  const ModeLattice& L = v.lattice();
  for (std::size_t i = 0; i < L.size() / 2; ++i) {
    const Mode k = L.mode(i);
    const double a = scale * std::pow(k.norm_sq(), -decay / 2);
    v.set(k.k1, k.k2, Complex(a * rng.normal(), a * rng.normal()));
  }
  return v;
}

/// Rescales v to unit norm in H^s.
inline FourierVelocityField normalized(FourierVelocityField v, SobolevIndex s) {
  const double n = sobolev_norm(v, s);
  return n > 0 ? (1.0 / n) * v : v;
}

/// Second-order finite-difference solver on an n x n periodic grid with RK4
/// time stepping; an independent check on the spectral solver.
class FiniteDifferenceSolver {
public:
  FiniteDifferenceSolver(const FourierVelocityField& v, double kappa, int n) : n_(n), kappa_(kappa) {
    auto [u1, u2] = v.components();
    u1_ = synthesize(u1.embedded(std::max(u1.K(), 1)), n);
    u2_ = synthesize(u2.embedded(std::max(u2.K(), 1)), n);
  }

  std::vector<double> initial(const FourierScalarField& f) const { return synthesize(f, n_); }

  /// Advances theta from t0 to t1 with steps no larger than dt.
  void advance(std::vector<double>& theta, double t0, double t1, double dt) const {
    const double span = t1 - t0;
    if (span <= 0)
      return;
    const auto steps = std::size_t(std::ceil(span / dt));
    const double h = span / double(steps);
    std::vector<double> k1(theta.size()), k2(theta.size()), k3(theta.size()), k4(theta.size()), tmp(theta.size());
    for (std::size_t s = 0; s < steps; ++s) {
      rhs(theta, k1);
      for (std::size_t i = 0; i < tmp.size(); ++i)
        tmp[i] = theta[i] + 0.5 * h * k1[i];
      rhs(tmp, k2);
      for (std::size_t i = 0; i < tmp.size(); ++i)
        tmp[i] = theta[i] + 0.5 * h * k2[i];
      rhs(tmp, k3);
      for (std::size_t i = 0; i < tmp.size(); ++i)
        tmp[i] = theta[i] + h * k3[i];
      rhs(tmp, k4);
      for (std::size_t i = 0; i < tmp.size(); ++i)
        theta[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
  }

  int n() const { return n_; }

private:
  void rhs(const std::vector<double>& th, std::vector<double>& out) const {
    const int n = n_;
    const double inv2h = n / 2.0;
    const double invh2 = double(n) * n;
    for (int i1 = 0; i1 < n; ++i1) {
      const int p1 = (i1 + 1) % n, m1 = (i1 + n - 1) % n;
      for (int i2 = 0; i2 < n; ++i2) {
        const int p2 = (i2 + 1) % n, m2 = (i2 + n - 1) % n;
        const std::size_t c = std::size_t(i1) * n + i2;
        const double d1 = (th[std::size_t(p1) * n + i2] - th[std::size_t(m1) * n + i2]) * inv2h;
        const double d2 = (th[std::size_t(i1) * n + p2] - th[std::size_t(i1) * n + m2]) * inv2h;
        const double lap = (th[std::size_t(p1) * n + i2] + th[std::size_t(m1) * n + i2] + th[std::size_t(i1) * n + p2] +
                            th[std::size_t(i1) * n + m2] - 4 * th[c]) *
                           invh2;
        out[c] = -(u1_[c] * d1 + u2_[c] * d2) + kappa_ * lap;
      }
    }
  }

  int n_;
  double kappa_;
  std::vector<double> u1_, u2_;
};

} // namespace testing
