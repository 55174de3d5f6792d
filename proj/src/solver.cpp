#include "passive/solver.hpp"

#include "passive/errors.hpp"
#include "passive/spectral_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

namespace passive {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;

// -P(u . grad theta) on the lattice, formed on an alias-free grid.
class AdvectionTerm {
public:
  AdvectionTerm(const FourierVelocityField& v, int K, int n)
      : lattice_(K), scalar_(K, n), g1_(lattice_.size()), g2_(lattice_.size()), grid1_(std::size_t(n) * n),
        grid2_(std::size_t(n) * n), u1_(std::size_t(n) * n), u2_(std::size_t(n) * n) {
    auto [c1, c2] = v.components();
    GridTransform vel(v.K(), n);
    vel.to_grid(c1.coeffs(), u1_);
    vel.to_grid(c2.coeffs(), u2_);
    umax_ = 0.0;
    for (std::size_t i = 0; i < u1_.size(); ++i)
      umax_ = std::max(umax_, std::hypot(u1_[i], u2_[i]));
    zero_ = umax_ == 0.0;
    k1_.resize(lattice_.size());
    k2_.resize(lattice_.size());
    for (std::size_t i = 0; i < lattice_.size(); ++i) {
      k1_[i] = two_pi * lattice_.mode(i).k1;
      k2_[i] = two_pi * lattice_.mode(i).k2;
    }
  }

  double max_speed() const { return umax_; }

  void apply(std::span<const Complex> theta, std::span<Complex> out) {
    if (zero_) {
      std::fill(out.begin(), out.end(), Complex{});
      return;
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
      g1_[i] = Complex(-k1_[i] * theta[i].imag(), k1_[i] * theta[i].real());
      g2_[i] = Complex(-k2_[i] * theta[i].imag(), k2_[i] * theta[i].real());
    }
    scalar_.to_grid(g1_, grid1_);
    scalar_.to_grid(g2_, grid2_);
    for (std::size_t i = 0; i < grid1_.size(); ++i)
      grid1_[i] = -(u1_[i] * grid1_[i] + u2_[i] * grid2_[i]);
    scalar_.from_grid(grid1_, out);
  }

private:
  ModeLattice lattice_;
  GridTransform scalar_;
  std::vector<Complex> g1_, g2_;
  std::vector<double> grid1_, grid2_, u1_, u2_;
  std::vector<double> k1_, k2_;
  double umax_ = 0.0;
  bool zero_ = false;
};

// Lawson (integrating-factor) RK4 for theta' = L theta + N(theta), L diagonal.
class Stepper {
public:
  Stepper(const FourierVelocityField& v, const SolverConfig& cfg, int n)
      : term_(v, cfg.K, n), decay_(ModeLattice(cfg.K).size()) {
    const ModeLattice lattice(cfg.K);
    for (std::size_t i = 0; i < lattice.size(); ++i)
      decay_[i] = -four_pi_sq * cfg.kappa * lattice.mode(i).norm_sq();
    const std::size_t m = decay_.size();
    for (auto* b : {&k1_, &k2_, &k3_, &k4_, &a_})
      b->resize(m);
    e_full_.resize(m);
    e_half_.resize(m);
  }

  double max_speed() const { return term_.max_speed(); }

  void step(std::vector<Complex>& th, double h) {
    if (h != h_cached_ && h == h_other_) {
      std::swap(h_cached_, h_other_);
      std::swap(e_half_, e_half_other_);
      std::swap(e_full_, e_full_other_);
    }
    if (h != h_cached_) {
      h_other_ = h_cached_;
      e_half_other_ = e_half_;
      e_full_other_ = e_full_;
      for (std::size_t i = 0; i < decay_.size(); ++i) {
        e_half_[i] = std::exp(decay_[i] * 0.5 * h);
        e_full_[i] = e_half_[i] * e_half_[i];
      }
      h_cached_ = h;
    }
    const std::size_t m = th.size();
    term_.apply(th, k1_);
    for (std::size_t i = 0; i < m; ++i)
      a_[i] = e_half_[i] * (th[i] + 0.5 * h * k1_[i]);
    term_.apply(a_, k2_);
    for (std::size_t i = 0; i < m; ++i)
      a_[i] = e_half_[i] * th[i] + 0.5 * h * k2_[i];
    term_.apply(a_, k3_);
    for (std::size_t i = 0; i < m; ++i)
      a_[i] = e_full_[i] * th[i] + h * e_half_[i] * k3_[i];
    term_.apply(a_, k4_);
    for (std::size_t i = 0; i < m; ++i)
      th[i] = e_full_[i] * th[i] +
              (h / 6.0) * (e_full_[i] * k1_[i] + 2.0 * e_half_[i] * (k2_[i] + k3_[i]) + k4_[i]);
  }

private:
  AdvectionTerm term_;
  std::vector<double> decay_;
  std::vector<Complex> k1_, k2_, k3_, k4_, a_;
  std::vector<double> e_full_, e_half_;
  double h_cached_ = -1.0;
  // grid steps alternate with side steps, so keep a second set of factors
  std::vector<double> e_full_other_, e_half_other_;
  double h_other_ = -1.0;
};

bool all_finite(std::span<const Complex> c) {
  for (const auto& z : c)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      return false;
  return true;
}

} // namespace

void SolverConfig::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw ConfigError("kappa must be positive");
  if (!(T >= 0.0) || !std::isfinite(T))
    throw ConfigError("T must be nonnegative");
  if (!(dt_max > 0.0) || (T > 0.0 && dt_max > T))
    throw ConfigError("dt_max must satisfy 0 < dt_max <= T");
  if (K < 0)
    throw ConfigError("K must be >= 0");
  if (grid_n != 0 && grid_n < 2 * K + 1)
    throw ConfigError("grid_n must be >= 2K+1");
  if (checkpoint_spacing < 0.0 || (T > 0.0 && checkpoint_spacing > T))
    throw ConfigError("checkpoint_spacing must lie in [0, T]");
}

int SolverConfig::effective_grid(int K_v) const {
  const int exact = 2 * K + K_v + 1;
  if (grid_n == 0)
    return std::max(exact + (exact % 2), 4);
  if (grid_n < exact)
    throw ConfigError("grid_n=" + std::to_string(grid_n) + " is below the alias-free size " +
                      std::to_string(exact) + " for K=" + std::to_string(K) + " and velocity K=" +
                      std::to_string(K_v));
  return grid_n;
}

double SolverConfig::effective_checkpoint_spacing() const {
  return checkpoint_spacing > 0.0 ? checkpoint_spacing : T / 64.0;
}

std::vector<double> ScalarTrajectory::times() const {
  std::vector<double> out;
  out.reserve(snapshots.size());
  for (const auto& s : snapshots)
    out.push_back(s.t);
  return out;
}

const FourierScalarField& ScalarTrajectory::at(double t) const {
  auto it = std::lower_bound(snapshots.begin(), snapshots.end(), t,
                             [](const Snapshot& s, double x) { return s.t < x; });
  if (it == snapshots.end() || it->t != t)
    throw std::out_of_range("trajectory has no snapshot at t=" + std::to_string(t));
  return it->theta;
}

namespace {

struct Prepared {
  FourierScalarField theta0;
  FourierVelocityField v;
  int n = 0;
};

Prepared prepare(const FourierVelocityField& v, const FourierScalarField& theta0, const SolverConfig& config) {
  config.validate();
  if (theta0.K() > config.K)
    throw LatticeMismatch("initial condition K=" + std::to_string(theta0.K()) + " exceeds solver K=" +
                          std::to_string(config.K));
  Prepared p;
  p.theta0 = theta0.K() == config.K ? theta0 : theta0.embedded(config.K);
  const int kv = v.effective_K();
  p.n = config.effective_grid(kv);
  // trim the velocity to its populated modes so the synthesis grid fits
  if (v.K() > kv) {
    FourierVelocityField trimmed(kv);
    for (std::size_t i = 0; i < trimmed.lattice().size(); ++i) {
      const Mode k = trimmed.lattice().mode(i);
      trimmed.set(k.k1, k.k2, v.amp(k.k1, k.k2));
    }
    p.v = std::move(trimmed);
  } else {
    p.v = v;
  }
  return p;
}

} // namespace

namespace {

std::size_t run(const Prepared& p, const SolverConfig& config, std::span<const double> targets,
                const SnapshotVisitor& visit, double* dt_used) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!(targets[i] >= 0.0 && targets[i] <= config.T))
      throw ConfigError("required time " + std::to_string(targets[i]) + " outside [0, T]");
    if (i && targets[i] < targets[i - 1])
      throw ConfigError("required times must be sorted");
  }
  Stepper stepper(p.v, config, p.n);
  double dt = config.dt_max;
  // halve until the advective Courant number is at most 1
  while (stepper.max_speed() * dt * p.n > 1.0)
    dt *= 0.5;
  if (dt_used)
    *dt_used = dt;

  // fixed step grid; targets between grid times are reached by a side step from
  // the preceding grid state, so values do not depend on which targets are asked for
  const std::size_t grid_steps = config.T > 0.0 ? std::size_t(std::ceil(config.T / dt - 1e-9)) : 0;
  const double H = grid_steps ? config.T / double(grid_steps) : 0.0;
  const double slack = 1e-12 * std::max(config.T, 1.0);
  std::vector<Complex> th(p.theta0.coeffs().begin(), p.theta0.coeffs().end());
  std::vector<Complex> side;
  std::size_t k = 0;
  std::size_t steps = 0;
  auto check = [&](std::span<const Complex> c, double t) {
    ++steps;
    if (!all_finite(c)) {
      std::ostringstream os;
      os << "non-finite value at step " << steps << " (t=" << t << ")";
      throw NumericError(os.str());
    }
  };
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double target = targets[i];
    while (k < grid_steps && double(k + 1) * H <= target + slack) {
      stepper.step(th, H);
      ++k;
      check(th, double(k) * H);
    }
    const double gap = target - double(k) * H;
    if (gap > slack) {
      side = th;
      stepper.step(side, gap);
      check(side, target);
      visit(i, target, side);
    } else {
      visit(i, target, th);
    }
  }
  return steps;
}

} // namespace

std::size_t integrate(const FourierVelocityField& v, const FourierScalarField& theta0, const SolverConfig& config,
                      std::span<const double> targets, const SnapshotVisitor& visit) {
  const Prepared p = prepare(v, theta0, config);
  return run(p, config, targets, visit, nullptr);
}

ScalarTrajectory solve(const FourierVelocityField& v, const FourierScalarField& theta0, const SolverConfig& config,
                       std::span<const double> required_times, std::string ic_id) {
  const Prepared p = prepare(v, theta0, config);
  ScalarTrajectory traj;
  traj.config = config;
  traj.ic_id = std::move(ic_id);
  traj.grid_used = p.n;
  traj.h_chk = config.effective_checkpoint_spacing();

  std::vector<double> targets{0.0};
  if (config.T > 0.0) {
    for (std::size_t i = 1;; ++i) {
      const double t = double(i) * traj.h_chk;
      if (t >= config.T * (1.0 - 1e-12))
        break;
      targets.push_back(t);
    }
    targets.push_back(config.T);
  }
  targets.insert(targets.end(), required_times.begin(), required_times.end());
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  const ModeLattice& lattice = p.theta0.lattice();
  traj.snapshots.reserve(targets.size());
  traj.dt_used = config.dt_max;
  run(p, config, targets,
      [&](std::size_t, double t, std::span<const Complex> th) {
        traj.snapshots.push_back({t, FourierScalarField(lattice, std::vector<Complex>(th.begin(), th.end()))});
      },
      &traj.dt_used);
  return traj;
}

TrajectoryPair paired_solve(const FourierVelocityField& v, const ICPair& ics, const SolverConfig& config,
                            std::span<const double> required_times) {
  return {solve(v, ics.first, config, required_times, ics.id + "#1"),
          solve(v, ics.second, config, required_times, ics.id + "#2")};
}

std::vector<EnergyRecord> energy_report(const ScalarTrajectory& traj) {
  std::vector<EnergyRecord> out;
  if (traj.snapshots.empty())
    return out;
  const double kappa = traj.config.kappa;
  auto moments = [](const FourierScalarField& f) {
    double l2 = 0.0, grad = 0.0;
    const auto c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double a = std::norm(c[i]);
      l2 += a;
      grad += four_pi_sq * f.lattice().mode(i).norm_sq() * a;
    }
    return std::pair{l2, grad};
  };
  const auto& snaps = traj.snapshots;
  const std::size_t n = snaps.size();
  std::vector<double> t(n), l2(n), grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = snaps[i].t;
    std::tie(l2[i], grad[i]) = moments(snaps[i].theta);
  }
  // each interval integrates the cubic through up to two neighbours on either side;
  // neighbours much closer than the interval itself are skipped to stay well conditioned
  auto interval = [&](std::size_t i) {
    const double h = t[i + 1] - t[i];
    std::vector<std::size_t> nodes = {i, i + 1};
    if (i > 0 && t[i] - t[i - 1] >= 0.25 * h)
      nodes.insert(nodes.begin(), i - 1);
    if (i + 2 < n && t[i + 2] - t[i + 1] >= 0.25 * h)
      nodes.push_back(i + 2);
    auto interp = [&](double x) {
      double acc = 0.0;
      for (std::size_t a : nodes) {
        double w = 1.0;
        for (std::size_t b : nodes)
          if (b != a)
            w *= (x - t[b]) / (t[a] - t[b]);
        acc += w * grad[a];
      }
      return acc;
    };
    const double mid = 0.5 * (t[i] + t[i + 1]), off = 0.5 * h / std::sqrt(3.0);
    return 0.5 * h * (interp(mid - off) + interp(mid + off));
  };
  double integral = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0)
      integral += interval(i - 1);
    const double diss = 2.0 * kappa * integral;
    out.push_back({t[i], l2[i], diss, l2[i] + diss - l2[0]});
  }
  return out;
}

namespace {

std::vector<std::size_t> strided(std::size_t n, std::size_t stride) {
  std::vector<std::size_t> idx;
  if (n == 0)
    return idx;
  for (std::size_t i = 0; i < n; i += std::max<std::size_t>(stride, 1))
    idx.push_back(i);
  if (idx.back() != n - 1)
    idx.push_back(n - 1);
  return idx;
}

double squared_distance(const ScalarTrajectory& a, const ScalarTrajectory& b, std::size_t stride) {
  if (a.snapshots.size() != b.snapshots.size())
    throw LatticeMismatch("paired distance: time grids differ in length");
  if (a.config.T != b.config.T || a.config.kappa != b.config.kappa)
    throw LatticeMismatch("paired distance: solver configurations differ");
  double acc = 0.0;
  double prev_t = 0.0, prev_f = 0.0;
  bool first = true;
  for (std::size_t i : strided(a.snapshots.size(), stride)) {
    const auto& sa = a.snapshots[i];
    const auto& sb = b.snapshots[i];
    if (sa.t != sb.t)
      throw LatticeMismatch("paired distance: snapshot times differ");
    const auto ca = sa.theta.coeffs();
    const auto cb = sb.theta.coeffs();
    if (ca.size() != cb.size())
      throw LatticeMismatch("paired distance: lattices differ");
    double f = 0.0;
    for (std::size_t k = 0; k < ca.size(); ++k)
      f += std::norm(ca[k] - cb[k]);
    if (!first)
      acc += 0.5 * (sa.t - prev_t) * (f + prev_f);
    first = false;
    prev_t = sa.t;
    prev_f = f;
  }
  return acc;
}

} // namespace

double distance_L2(const ScalarTrajectory& a, const ScalarTrajectory& b, std::size_t stride) {
  return std::sqrt(squared_distance(a, b, stride));
}

double paired_distance_L2(const TrajectoryPair& a, const TrajectoryPair& b, std::size_t stride) {
  return std::sqrt(squared_distance(a.first, b.first, stride) + squared_distance(a.second, b.second, stride));
}

double trajectory_sup(const ScalarTrajectory& traj, int n) {
  double out = 0.0;
  for (const auto& s : traj.snapshots) {
    const auto grid = synthesize(s.theta, std::max(n, 2 * s.theta.K() + 1));
    for (double g : grid)
      out = std::max(out, std::abs(g));
  }
  return out;
}

} // namespace passive
