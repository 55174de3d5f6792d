#include "passive/quadrature.hpp"

#include "passive/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace passive {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::size_t(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error)
            error = std::current_exception();
        }
      }
    });
  for (auto& t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

namespace {

double log_sum_exp(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x)
    m = std::max(m, v);
  if (!std::isfinite(m))
    return m;
  double s = 0.0;
  for (double v : x)
    s += std::exp(v - m);
  return m + std::log(s);
}

struct Level {
  std::vector<std::vector<double>> nodes;
  std::vector<double> log_prior;  // log density
  std::vector<double> phi;
  std::vector<double> lo, hi, h;
  double cell_volume = 1.0;
};

Level build_level(const PriorSpec& spec, const std::vector<double>& lo, const std::vector<double>& hi, int g) {
  Level L;
  L.lo = lo;
  L.hi = hi;
  const std::size_t d = lo.size();
  L.h.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    L.h[i] = (hi[i] - lo[i]) / g;
    L.cell_volume *= L.h[i];
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i)
    total *= std::size_t(g);
  std::vector<int> idx(d, 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i)
      x[i] = lo[i] + (idx[i] + 0.5) * L.h[i];
    const double lp = spec.log_density(x);
    if (std::isfinite(lp)) {
      L.nodes.push_back(std::move(x));
      L.log_prior.push_back(lp);
    }
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < g)
        break;
      idx[i] = 0;
    }
  }
  return L;
}

void evaluate_level(Level& L, const CoordPotential& phi, int threads) {
  L.phi.assign(L.nodes.size(), 0.0);
  parallel_for(L.nodes.size(), threads, [&](std::size_t i) {
    const double p = phi(L.nodes[i]);
    if (std::isnan(p))
      throw NumericError("potential returned NaN at a quadrature node");
    L.phi[i] = p;
  });
}

bool inside(std::span<const double> x, const std::vector<double>& lo, const std::vector<double>& hi) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i])
      return false;
  return true;
}

} // namespace

QuadratureResult quadrature_posterior(const PriorSpec& spec, const CoordPotential& phi, QuadratureOptions opts) {
  spec.validate();
  const std::size_t d = spec.dim();
  if (d > 4)
    throw BudgetError("quadrature refused: " + std::to_string(d) + " coordinates exceed the limit of 4");
  if (opts.grid_per_dim < 17)
    throw ConfigError("grid_per_dim must be at least 17");

  QuadratureResult out;
  out.family = spec.family;
  auto [lo, hi] = spec.box();
  if (spec.radius == 0.0) {
    // point mass prior
    out.nodes = {spec.center_coords()};
    out.phi = {phi(out.nodes[0])};
    out.weights = {1.0};
    out.prior_weights = {1.0};
    out.lo = lo;
    out.hi = hi;
    out.log_normalizer = -out.phi[0];
    out.normalizer = std::exp(out.log_normalizer);
    out.evaluations = 1;
    return out;
  }

  Level L = build_level(spec, lo, hi, opts.grid_per_dim);
  if (L.nodes.empty())
    throw NumericError("no quadrature node inside the prior support");
  evaluate_level(L, phi, opts.threads);
  out.evaluations = L.nodes.size();

  // prior normalization on the first grid
  std::vector<double> lp0(L.nodes.size());
  for (std::size_t i = 0; i < lp0.size(); ++i)
    lp0[i] = L.log_prior[i] + std::log(L.cell_volume);
  const double log_prior_total = log_sum_exp(lp0);

  auto log_weights = [&](const Level& lev) {
    std::vector<double> lw(lev.nodes.size());
    for (std::size_t i = 0; i < lw.size(); ++i)
      lw[i] = lev.log_prior[i] + std::log(lev.cell_volume) - log_prior_total - lev.phi[i];
    return lw;
  };

  std::vector<double> lw = log_weights(L);
  double outside_log_mass = -std::numeric_limits<double>::infinity();  // unnormalized posterior mass dropped
  double prior_outside = 0.0;
  int level = 0;
  while (opts.zoom && level < opts.max_levels) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : lw)
      m = std::max(m, v);
    if (!std::isfinite(m))
      break;
    std::vector<double> nlo(d, std::numeric_limits<double>::infinity()), nhi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < lw.size(); ++i)
      if (lw[i] >= m - opts.log_cut)
        for (std::size_t k = 0; k < d; ++k) {
          nlo[k] = std::min(nlo[k], L.nodes[i][k] - 1.5 * L.h[k]);
          nhi[k] = std::max(nhi[k], L.nodes[i][k] + 1.5 * L.h[k]);
        }
    bool shrinks = false;
    for (std::size_t k = 0; k < d; ++k) {
      nlo[k] = std::max(nlo[k], L.lo[k]);
      nhi[k] = std::min(nhi[k], L.hi[k]);
      if (nhi[k] - nlo[k] < opts.min_shrink * (L.hi[k] - L.lo[k]))
        shrinks = true;
    }
    if (!shrinks)
      break;
    Level next = build_level(spec, nlo, nhi, opts.grid_per_dim);
    if (next.nodes.size() < 2)
      break;
    // mass of the current level lying outside the new box is dropped
    std::vector<double> dropped, dropped_prior;
    for (std::size_t i = 0; i < L.nodes.size(); ++i)
      if (!inside(L.nodes[i], nlo, nhi)) {
        dropped.push_back(lw[i]);
        dropped_prior.push_back(L.log_prior[i] + std::log(L.cell_volume) - log_prior_total);
      }
    if (!dropped.empty()) {
      const double a = log_sum_exp(dropped);
      outside_log_mass = std::max(outside_log_mass, a) +
                         std::log1p(std::exp(std::min(outside_log_mass, a) - std::max(outside_log_mass, a)));
      prior_outside += std::exp(log_sum_exp(dropped_prior));
    }
    evaluate_level(next, phi, opts.threads);
    out.evaluations += next.nodes.size();
    L = std::move(next);
    lw = log_weights(L);
    ++level;
  }

  const double log_in = log_sum_exp(lw);
  double log_total = log_in;
  if (std::isfinite(outside_log_mass))
    log_total = std::max(log_in, outside_log_mass) +
                std::log1p(std::exp(std::min(log_in, outside_log_mass) - std::max(log_in, outside_log_mass)));
  if (!std::isfinite(log_in))
    throw NumericError("posterior weights vanish on every quadrature node");
  out.levels = level;
  out.nodes = L.nodes;
  out.phi = L.phi;
  out.lo = L.lo;
  out.hi = L.hi;
  out.log_normalizer = log_total;
  out.normalizer = std::exp(log_total);
  out.discarded_mass = std::isfinite(outside_log_mass) ? std::exp(outside_log_mass - log_total) : 0.0;
  out.prior_mass_outside = prior_outside;
  out.weights.resize(lw.size());
  out.prior_weights.resize(lw.size());
  for (std::size_t i = 0; i < lw.size(); ++i) {
    out.weights[i] = std::exp(lw[i] - log_in);
    out.prior_weights[i] = std::exp(L.log_prior[i] + std::log(L.cell_volume) - log_prior_total);
  }
  return out;
}

QuadratureResult quadrature_posterior(const PriorSpec& spec, const Potential& pot, QuadratureOptions opts) {
  return quadrature_posterior(
      spec, [&](std::span<const double> c) { return pot(spec.family.velocity(c)); }, opts);
}

std::vector<double> QuadratureResult::mean() const {
  std::vector<double> m(family.dim(), 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t k = 0; k < m.size(); ++k)
      m[k] += weights[i] * nodes[i][k];
  return m;
}

double QuadratureResult::mass_where(const std::function<bool(std::span<const double>)>& pred) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (pred(nodes[i]))
      s += weights[i];
  return s;
}

double QuadratureResult::prior_mass_where(const std::function<bool(std::span<const double>)>& pred) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (pred(nodes[i]))
      s += prior_weights[i];
  return s;
}

double QuadratureResult::ball_mass(std::span<const double> center, double radius, SobolevIndex s) const {
  const Eigen::MatrixXd G = family.gram(s);
  const std::size_t d = family.dim();
  return mass_where([&](std::span<const double> x) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(Eigen::Index(d));
    for (std::size_t k = 0; k < d; ++k)
      r(Eigen::Index(k)) = x[k] - center[k];
    return std::sqrt(std::max(0.0, r.dot(G * r))) <= radius;
  });
}

double QuadratureResult::tv_to_prior() const {
  double s = 0.0, covered = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    s += std::abs(weights[i] - prior_weights[i]);
    covered += prior_weights[i];
  }
  return 0.5 * (s + std::max(0.0, 1.0 - covered));
}

std::string quadrature_report_json(const QuadratureResult& q, std::span<const BallQuery> balls) {
  nlohmann::ordered_json j;
  j["normalizer"] = q.normalizer;
  j["log_normalizer"] = q.log_normalizer;
  j["mean"] = q.mean();
  j["levels"] = q.levels;
  j["nodes"] = q.nodes.size();
  j["discarded_mass"] = q.discarded_mass;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& b : balls)
    arr.push_back({{"center_id", b.center_id},
                   {"radius", b.radius},
                   {"norm", b.norm.s},
                   {"mass", q.ball_mass(b.center, b.radius, b.norm)}});
  j["ball_masses"] = arr;
  return j.dump(2) + "\n";
}

} // namespace passive
