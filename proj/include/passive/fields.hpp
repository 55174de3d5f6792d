#pragma once

#include "passive/lattice.hpp"

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace passive {

using Complex = std::complex<double>;

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct Vec2 {
  double u1 = 0.0;
  double u2 = 0.0;
};

struct SobolevIndex {
  double s = 0.0;
};

/// The three regularity exponents used throughout: the parameter space
/// H = H^m, the higher-regularity space V = H^{m_star} and the initial
/// condition space H^{s_ic}.
struct SobolevScale {
  double m = 2.0;
  double m_star = 3.0;
  double s_ic = 2.0;

  /// Throws ConfigError unless m > 1, m_star > m and 1 < s_ic <= m.
  void validate() const;
  SobolevIndex H() const { return {m}; }
  SobolevIndex V() const { return {m_star}; }
  SobolevIndex ic() const { return {s_ic}; }
};

/// Real, mean-free periodic scalar field sum_k c_k e^{2 pi i k.x}.
/// Both members of every conjugate pair are stored and conj(c_k) == c_{-k}.
class FourierScalarField {
public:
  FourierScalarField() = default;
  explicit FourierScalarField(int K) : lattice_(K), coeffs_(lattice_.size()) {}
  /// Takes arbitrary coefficients and projects them onto the real fields.
  FourierScalarField(ModeLattice lattice, std::vector<Complex> coeffs);

  const ModeLattice& lattice() const { return lattice_; }
  int K() const { return lattice_.K(); }
  std::span<const Complex> coeffs() const { return coeffs_; }
  Complex coeff(int k1, int k2) const;

  /// Sets c_k and c_{-k} = conj(c_k); c must be real when k == -k (never, on Z^2 \ 0).
  void set(int k1, int k2, Complex c);
  FourierScalarField embedded(int K) const;

  FourierScalarField& operator+=(const FourierScalarField& o);
  FourierScalarField& operator-=(const FourierScalarField& o);
  FourierScalarField& operator*=(double a);

private:
  ModeLattice lattice_;
  std::vector<Complex> coeffs_;
};

FourierScalarField operator+(FourierScalarField a, const FourierScalarField& b);
FourierScalarField operator-(FourierScalarField a, const FourierScalarField& b);
FourierScalarField operator*(double a, FourierScalarField f);

/// Divergence-free velocity u(x) = sum_k v_k (k^perp/|k|) e^{2 pi i k.x},
/// k^perp = (-k2, k1), with conj(v_k) == -v_{-k}.
class FourierVelocityField {
public:
  FourierVelocityField() = default;
  explicit FourierVelocityField(int K) : lattice_(K), amps_(lattice_.size()) {}
  FourierVelocityField(ModeLattice lattice, std::vector<Complex> amps);

  const ModeLattice& lattice() const { return lattice_; }
  int K() const { return lattice_.K(); }
  std::span<const Complex> amps() const { return amps_; }
  Complex amp(int k1, int k2) const;

  /// Sets v_k and v_{-k} = -conj(v_k).
  void set(int k1, int k2, Complex v);
  FourierVelocityField embedded(int K) const;

  /// Scalar components (u1, u2) as real Fourier fields.
  std::pair<FourierScalarField, FourierScalarField> components() const;
  /// Largest nonzero |k|_inf, 0 for the zero field.
  int effective_K() const;

  FourierVelocityField& operator+=(const FourierVelocityField& o);
  FourierVelocityField& operator-=(const FourierVelocityField& o);
  FourierVelocityField& operator*=(double a);

private:
  ModeLattice lattice_;
  std::vector<Complex> amps_;
};

FourierVelocityField operator+(FourierVelocityField a, const FourierVelocityField& b);
FourierVelocityField operator-(FourierVelocityField a, const FourierVelocityField& b);
FourierVelocityField operator*(double a, FourierVelocityField f);

double sobolev_norm(const FourierScalarField& f, SobolevIndex s);
double sobolev_norm(const FourierVelocityField& v, SobolevIndex s);

enum class EmbedPolicy { allow, strict };

/// Sobolev distance |v1 - v2|_{H^s}; the smaller truncation is embedded
/// into the larger unless the policy is strict.
double distance_H(const FourierVelocityField& v1, const FourierVelocityField& v2, SobolevIndex s,
                  EmbedPolicy policy = EmbedPolicy::allow);

/// Exact truncated Fourier sums at the given points (wrapped into [0,1)^2).
std::vector<double> evaluate(const FourierScalarField& f, std::span<const Point> points);
double evaluate(const FourierScalarField& f, Point x);
std::vector<Vec2> velocity_at(const FourierVelocityField& v, std::span<const Point> points);

/// Spectral gradient (d/dx1, d/dx2) including the 2 pi factors.
std::pair<FourierScalarField, FourierScalarField> gradient(const FourierScalarField& f);
/// Spectral divergence of u, returned as a scalar field.
FourierScalarField divergence(const FourierVelocityField& v);

/// Real-space samples on the n x n grid x = (i1/n, i2/n), row-major in i1.
/// Requires n >= 2K+1.
std::vector<double> synthesize(const FourierScalarField& f, int n);
/// Grid maximum of |f| after local refinement around the best nodes.
double sup_norm(const FourierScalarField& f, int n = 64);

/// Evaluator for one field at many points; precomputes nothing shared, but
/// reuses its scratch buffers across calls.
class PointEvaluator {
public:
  explicit PointEvaluator(int K);
  /// Fills the per-axis exponentials for x; subsequent value() calls reuse them.
  void locate(Point x);
  double value(std::span<const Complex> coeffs) const;

private:
  int K_;
  std::vector<Complex> e1_, e2_;
};

} // namespace passive
