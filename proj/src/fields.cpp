#include "passive/fields.hpp"

#include "passive/errors.hpp"
#include "passive/spectral_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace passive {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

void fill_axis(std::vector<Complex>& e, int K, double x) {
  // e[k+K] = exp(2 pi i k x) for k in [-K, K]
  e.assign(std::size_t(2 * K + 1), Complex(1.0, 0.0));
  if (K == 0)
    return;
  const Complex w = std::polar(1.0, two_pi * x);
  for (int k = 1; k <= K; ++k) {
    // direct evaluation keeps the error independent of K
    e[std::size_t(K + k)] = k <= 4 ? e[std::size_t(K + k - 1)] * w : std::polar(1.0, two_pi * k * x);
    e[std::size_t(K - k)] = std::conj(e[std::size_t(K + k)]);
  }
}

template <class Vec>
void check_same_lattice(const Vec& a, const Vec& b, const char* what) {
  if (!(a.lattice() == b.lattice())) {
    std::ostringstream os;
    os << what << ": lattice K=" << a.K() << " vs K=" << b.K();
    throw LatticeMismatch(os.str());
  }
}

} // namespace

void SobolevScale::validate() const {
  if (!(m > 1.0))
    throw ConfigError("sobolev m must exceed 1");
  if (!(m_star > m))
    throw ConfigError("sobolev m_star must exceed m");
  if (!(s_ic > 1.0 && s_ic <= m))
    throw ConfigError("sobolev s_ic must satisfy 1 < s_ic <= m");
}

// ---------------------------------------------------------------- scalar

FourierScalarField::FourierScalarField(ModeLattice lattice, std::vector<Complex> coeffs)
    : lattice_(std::move(lattice)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != lattice_.size())
    throw LatticeMismatch("coefficient count does not match lattice size");
  for (std::size_t i = 0; i < coeffs_.size() / 2; ++i) {
    const std::size_t j = lattice_.conjugate(i);
    const Complex c = 0.5 * (coeffs_[i] + std::conj(coeffs_[j]));
    coeffs_[i] = c;
    coeffs_[j] = std::conj(c);
  }
}

Complex FourierScalarField::coeff(int k1, int k2) const {
  return lattice_.contains(k1, k2) ? coeffs_[lattice_.index(k1, k2)] : Complex{};
}

void FourierScalarField::set(int k1, int k2, Complex c) {
  if (!lattice_.contains(k1, k2))
    throw LatticeMismatch("mode outside lattice");
  coeffs_[lattice_.index(k1, k2)] = c;
  coeffs_[lattice_.index(-k1, -k2)] = std::conj(c);
}

FourierScalarField FourierScalarField::embedded(int K) const {
  if (K < this->K())
    throw LatticeMismatch("cannot embed K=" + std::to_string(this->K()) + " into K=" + std::to_string(K));
  FourierScalarField out(K);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const Mode k = lattice_.mode(i);
    out.coeffs_[out.lattice_.index(k.k1, k.k2)] = coeffs_[i];
  }
  return out;
}

FourierScalarField& FourierScalarField::operator+=(const FourierScalarField& o) {
  check_same_lattice(*this, o, "scalar +");
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    coeffs_[i] += o.coeffs_[i];
  return *this;
}

FourierScalarField& FourierScalarField::operator-=(const FourierScalarField& o) {
  check_same_lattice(*this, o, "scalar -");
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    coeffs_[i] -= o.coeffs_[i];
  return *this;
}

FourierScalarField& FourierScalarField::operator*=(double a) {
  for (auto& c : coeffs_)
    c *= a;
  return *this;
}

FourierScalarField operator+(FourierScalarField a, const FourierScalarField& b) { return a += b; }
FourierScalarField operator-(FourierScalarField a, const FourierScalarField& b) { return a -= b; }
FourierScalarField operator*(double a, FourierScalarField f) { return f *= a; }

// ---------------------------------------------------------------- velocity

FourierVelocityField::FourierVelocityField(ModeLattice lattice, std::vector<Complex> amps)
    : lattice_(std::move(lattice)), amps_(std::move(amps)) {
  if (amps_.size() != lattice_.size())
    throw LatticeMismatch("amplitude count does not match lattice size");
  for (std::size_t i = 0; i < amps_.size() / 2; ++i) {
    const std::size_t j = lattice_.conjugate(i);
    const Complex v = 0.5 * (amps_[i] - std::conj(amps_[j]));
    amps_[i] = v;
    amps_[j] = -std::conj(v);
  }
}

Complex FourierVelocityField::amp(int k1, int k2) const {
  return lattice_.contains(k1, k2) ? amps_[lattice_.index(k1, k2)] : Complex{};
}

void FourierVelocityField::set(int k1, int k2, Complex v) {
  if (!lattice_.contains(k1, k2))
    throw LatticeMismatch("mode outside lattice");
  amps_[lattice_.index(k1, k2)] = v;
  amps_[lattice_.index(-k1, -k2)] = -std::conj(v);
}

FourierVelocityField FourierVelocityField::embedded(int K) const {
  if (K < this->K())
    throw LatticeMismatch("cannot embed K=" + std::to_string(this->K()) + " into K=" + std::to_string(K));
  FourierVelocityField out(K);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const Mode k = lattice_.mode(i);
    out.amps_[out.lattice_.index(k.k1, k.k2)] = amps_[i];
  }
  return out;
}

std::pair<FourierScalarField, FourierScalarField> FourierVelocityField::components() const {
  std::vector<Complex> c1(amps_.size()), c2(amps_.size());
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const Mode k = lattice_.mode(i);
    const double inv = 1.0 / std::sqrt(k.norm_sq());
    c1[i] = amps_[i] * (-k.k2 * inv);
    c2[i] = amps_[i] * (k.k1 * inv);
  }
  return {FourierScalarField(lattice_, std::move(c1)), FourierScalarField(lattice_, std::move(c2))};
}

int FourierVelocityField::effective_K() const {
  int out = 0;
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if (amps_[i] != Complex{}) {
      const Mode k = lattice_.mode(i);
      out = std::max({out, std::abs(k.k1), std::abs(k.k2)});
    }
  return out;
}

FourierVelocityField& FourierVelocityField::operator+=(const FourierVelocityField& o) {
  check_same_lattice(*this, o, "velocity +");
  for (std::size_t i = 0; i < amps_.size(); ++i)
    amps_[i] += o.amps_[i];
  return *this;
}

FourierVelocityField& FourierVelocityField::operator-=(const FourierVelocityField& o) {
  check_same_lattice(*this, o, "velocity -");
  for (std::size_t i = 0; i < amps_.size(); ++i)
    amps_[i] -= o.amps_[i];
  return *this;
}

FourierVelocityField& FourierVelocityField::operator*=(double a) {
  for (auto& v : amps_)
    v *= a;
  return *this;
}

FourierVelocityField operator+(FourierVelocityField a, const FourierVelocityField& b) { return a += b; }
FourierVelocityField operator-(FourierVelocityField a, const FourierVelocityField& b) { return a -= b; }
FourierVelocityField operator*(double a, FourierVelocityField f) { return f *= a; }

// ---------------------------------------------------------------- norms

namespace {

double weighted_sum(const ModeLattice& lattice, std::span<const Complex> c, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    acc += std::pow(lattice.mode(i).norm_sq(), s) * std::norm(c[i]);
  return acc;
}

} // namespace

double sobolev_norm(const FourierScalarField& f, SobolevIndex s) {
  return std::sqrt(weighted_sum(f.lattice(), f.coeffs(), s.s));
}

double sobolev_norm(const FourierVelocityField& v, SobolevIndex s) {
  return std::sqrt(weighted_sum(v.lattice(), v.amps(), s.s));
}

double distance_H(const FourierVelocityField& v1, const FourierVelocityField& v2, SobolevIndex s,
                  EmbedPolicy policy) {
  if (v1.K() == v2.K())
    return sobolev_norm(v1 - v2, s);
  if (policy == EmbedPolicy::strict)
    throw LatticeMismatch("distance_H: incompatible truncations K=" + std::to_string(v1.K()) + " and K=" +
                          std::to_string(v2.K()));
  const int K = std::max(v1.K(), v2.K());
  return sobolev_norm(v1.embedded(K) - v2.embedded(K), s);
}

// ---------------------------------------------------------------- evaluation

PointEvaluator::PointEvaluator(int K) : K_(K) {}

void PointEvaluator::locate(Point x) {
  fill_axis(e1_, K_, wrap(x.x1));
  fill_axis(e2_, K_, wrap(x.x2));
}

double PointEvaluator::value(std::span<const Complex> coeffs) const {
  // Conjugate pairs contribute 2 Re(c_k e_k); sum the first half only.
  const std::size_t side = std::size_t(2 * K_ + 1);
  const std::size_t half = coeffs.size() / 2;
  double acc = 0.0;
  std::size_t i = 0;
  for (std::size_t a = 0; a < side && i < half; ++a) {
    const Complex ea = e1_[a];
    for (std::size_t b = 0; b < side && i < half; ++b, ++i) {
      const Complex e = ea * e2_[b];
      acc += coeffs[i].real() * e.real() - coeffs[i].imag() * e.imag();
    }
  }
  return 2.0 * acc;
}

std::vector<double> evaluate(const FourierScalarField& f, std::span<const Point> points) {
  const int K = f.K();
  std::vector<double> out;
  out.reserve(points.size());
  std::vector<Complex> e1, e2;
  const auto c = f.coeffs();
  double scale = 0.0;
  for (const auto& ci : c)
    scale += std::abs(ci);
  for (const Point& x : points) {
    fill_axis(e1, K, wrap(x.x1));
    fill_axis(e2, K, wrap(x.x2));
    Complex acc{};
    for (std::size_t i = 0; i < c.size(); ++i) {
      const Mode k = f.lattice().mode(i);
      acc += c[i] * e1[std::size_t(k.k1 + K)] * e2[std::size_t(k.k2 + K)];
    }
    if (std::abs(acc.imag()) > 1e-12 * std::max(1.0, scale))
      throw NumericError("evaluate: imaginary residue " + std::to_string(acc.imag()) +
                         " violates the reality invariant");
    out.push_back(acc.real());
  }
  return out;
}

double evaluate(const FourierScalarField& f, Point x) {
  return evaluate(f, std::span<const Point>(&x, 1)).front();
}

std::vector<Vec2> velocity_at(const FourierVelocityField& v, std::span<const Point> points) {
  auto [u1, u2] = v.components();
  const auto a = evaluate(u1, points);
  const auto b = evaluate(u2, points);
  std::vector<Vec2> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    out[i] = {a[i], b[i]};
  return out;
}

std::pair<FourierScalarField, FourierScalarField> gradient(const FourierScalarField& f) {
  const auto c = f.coeffs();
  std::vector<Complex> g1(c.size()), g2(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Mode k = f.lattice().mode(i);
    g1[i] = Complex(0.0, two_pi * k.k1) * c[i];
    g2[i] = Complex(0.0, two_pi * k.k2) * c[i];
  }
  return {FourierScalarField(f.lattice(), std::move(g1)), FourierScalarField(f.lattice(), std::move(g2))};
}

FourierScalarField divergence(const FourierVelocityField& v) {
  auto [u1, u2] = v.components();
  auto d1 = gradient(u1).first;
  auto d2 = gradient(u2).second;
  return d1 + d2;
}

std::vector<double> synthesize(const FourierScalarField& f, int n) {
  GridTransform tr(f.K(), n);
  std::vector<double> grid(std::size_t(n) * std::size_t(n));
  tr.to_grid(f.coeffs(), grid);
  return grid;
}

double sup_norm(const FourierScalarField& f, int n) {
  n = std::max(n, 2 * f.K() + 1);
  const auto grid = synthesize(f, n);
  // refine around the few largest grid nodes with a shrinking pattern search
  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  const std::size_t top = std::min<std::size_t>(8, order.size());
  std::partial_sort(order.begin(), order.begin() + long(top), order.end(),
                    [&](std::size_t a, std::size_t b) { return std::abs(grid[a]) > std::abs(grid[b]); });
  double best = top ? std::abs(grid[order[0]]) : 0.0;
  for (std::size_t r = 0; r < top; ++r) {
    Point x{double(order[r] / std::size_t(n)) / n, double(order[r] % std::size_t(n)) / n};
    double val = std::abs(evaluate(f, x));
    double h = 1.0 / n;
    while (h > 1e-9) {
      bool moved = false;
      for (int d1 = -1; d1 <= 1; ++d1)
        for (int d2 = -1; d2 <= 1; ++d2) {
          if (!d1 && !d2)
            continue;
          const Point y{x.x1 + d1 * h, x.x2 + d2 * h};
          const double vy = std::abs(evaluate(f, y));
          if (vy > val) {
            val = vy;
            x = y;
            moved = true;
          }
        }
      if (!moved)
        h *= 0.5;
    }
    best = std::max(best, val);
  }
  return best;
}

// ---------------------------------------------------------------- FFT grid

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace

struct GridTransform::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan c2r = nullptr;
  fftw_plan r2c = nullptr;
};

GridTransform::GridTransform(int K, int n) : K_(K), n_(n), plans_(std::make_unique<Plans>()) {
  if (n < 2 * K + 1)
    throw ConfigError("grid_n=" + std::to_string(n) + " cannot resolve K=" + std::to_string(K) +
                      " (need grid_n >= 2K+1)");
  half_ = std::size_t(n / 2 + 1);
  const ModeLattice lattice(K);
  slot_.assign(lattice.size(), std::size_t(-1));
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const Mode k = lattice.mode(i);
    if (k.k2 < 0)
      continue;
    const std::size_t row = std::size_t(k.k1 >= 0 ? k.k1 : n + k.k1);
    slot_[i] = row * half_ + std::size_t(k.k2);
  }
  std::lock_guard lock(planner_mutex());
  plans_->real = fftw_alloc_real(std::size_t(n) * std::size_t(n));
  plans_->spec = fftw_alloc_complex(std::size_t(n) * half_);
  plans_->c2r = fftw_plan_dft_c2r_2d(n, n, plans_->spec, plans_->real, FFTW_ESTIMATE);
  plans_->r2c = fftw_plan_dft_r2c_2d(n, n, plans_->real, plans_->spec, FFTW_ESTIMATE);
}

GridTransform::~GridTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plans_->c2r);
  fftw_destroy_plan(plans_->r2c);
  fftw_free(plans_->real);
  fftw_free(plans_->spec);
}

void GridTransform::to_grid(std::span<const Complex> coeffs, std::span<double> grid) {
  fftw_complex* spec = plans_->spec;
  std::fill_n(&spec[0][0], 2 * std::size_t(n_) * half_, 0.0);
  for (std::size_t i = 0; i < slot_.size(); ++i)
    if (slot_[i] != std::size_t(-1)) {
      spec[slot_[i]][0] = coeffs[i].real();
      spec[slot_[i]][1] = coeffs[i].imag();
    }
  fftw_execute(plans_->c2r);
  std::copy_n(plans_->real, grid.size(), grid.begin());
}

void GridTransform::from_grid(std::span<const double> grid, std::span<Complex> coeffs) {
  std::copy(grid.begin(), grid.end(), plans_->real);
  fftw_execute(plans_->r2c);
  const double inv = 1.0 / (double(n_) * double(n_));
  const std::size_t half = coeffs.size() / 2;
  for (std::size_t i = 0; i < slot_.size(); ++i) {
    if (slot_[i] == std::size_t(-1))
      continue;
    const Complex c(plans_->spec[slot_[i]][0] * inv, plans_->spec[slot_[i]][1] * inv);
    coeffs[i] = c;
  }
  // modes with k2 < 0 are the conjugates of stored ones; k2 == 0 rows are
  // both present in the half spectrum but must stay exactly conjugate
  for (std::size_t i = 0; i < half; ++i) {
    const std::size_t j = coeffs.size() - 1 - i;
    if (slot_[i] == std::size_t(-1))
      coeffs[i] = std::conj(coeffs[j]);
    else if (slot_[j] == std::size_t(-1))
      coeffs[j] = std::conj(coeffs[i]);
    else {
      const Complex c = 0.5 * (coeffs[i] + std::conj(coeffs[j]));
      coeffs[i] = c;
      coeffs[j] = std::conj(c);
    }
  }
}

} // namespace passive
