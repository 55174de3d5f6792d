#include "passive/pcn.hpp"

#include "passive/errors.hpp"
#include "passive/field_io.hpp"

#include <algorithm>
#include <cmath>

namespace passive {

bool ChainState::verify(const CoordPotential& phi_fn, double tol) const {
  const double fresh = phi_fn(coords);
  if (std::isinf(fresh) || std::isinf(phi))
    return fresh == phi;
  return std::abs(fresh - phi) <= tol * std::max(1.0, std::abs(phi));
}

double ChainResult::acceptance_rate() const {
  const std::size_t n = trace.size() - burn_in;
  if (n == 0)
    return 0.0;
  std::size_t a = 0;
  for (std::size_t i = burn_in; i < trace.size(); ++i)
    a += trace[i].accepted;
  return double(a) / double(n);
}

std::vector<double> ChainResult::mean() const {
  const std::size_t d = state.coords.size();
  std::vector<double> m(d, 0.0);
  const std::size_t n = trace.size() - burn_in;
  if (n == 0)
    return m;
  for (std::size_t i = burn_in; i < trace.size(); ++i)
    for (std::size_t k = 0; k < d; ++k)
      m[k] += trace[i].coords[k];
  for (auto& x : m)
    x /= double(n);
  return m;
}

std::vector<double> ChainResult::standard_error(std::size_t batches) const {
  const std::size_t d = state.coords.size();
  const std::size_t n = trace.size() - burn_in;
  std::vector<double> se(d, 0.0);
  const std::size_t b = n / batches;
  if (batches < 2 || b == 0)
    return se;
  const auto m = mean();
  for (std::size_t k = 0; k < d; ++k) {
    double ss = 0.0;
    for (std::size_t j = 0; j < batches; ++j) {
      double bm = 0.0;
      for (std::size_t i = 0; i < b; ++i)
        bm += trace[burn_in + j * b + i].coords[k];
      bm /= double(b);
      ss += (bm - m[k]) * (bm - m[k]);
    }
    se[k] = std::sqrt(ss / double(batches - 1) / double(batches));
  }
  return se;
}

ChainResult pcn_chain(const PriorSpec& spec, const CoordPotential& phi, PcnOptions opts, Philox& rng,
                      std::span<const double> init) {
  if (!(opts.beta >= 0.0 && opts.beta <= 1.0))
    throw ConfigError("pcn beta must lie in [0, 1]");
  PriorSampler sampler(spec);
  const std::size_t d = spec.dim();
  if (init.size() != d)
    throw ConfigError("pcn init has the wrong number of coordinates");
  if (!spec.in_support(init))
    throw ConfigError("pcn init lies outside the prior support");

  const bool latent = spec.kind == PriorKind::uniform_ball;
  const auto c = spec.center_coords();
  const auto tau = spec.tau();

  ChainResult out;
  out.burn_in = opts.burn_in;
  out.trace.reserve(opts.burn_in + opts.n_steps);
  std::vector<double> x(init.begin(), init.end());
  std::vector<double> z = latent ? sampler.to_latent(x) : std::vector<double>{};
  if (latent)
    x = sampler.from_latent(z);
  double phi_x = phi(x);
  double beta = opts.beta;
  std::size_t window_accepts = 0, window_steps = 0;

  std::vector<double> xi(d), prop(d), zprop(d);
  const std::size_t total = opts.burn_in + opts.n_steps;
  for (std::size_t step = 0; step < total; ++step) {
    for (auto& e : xi)
      e = rng.normal();
    const double u = rng.uniform();
    const double rho = std::sqrt(1.0 - beta * beta);
    bool in_support = true;
    if (latent) {
      for (std::size_t k = 0; k < d; ++k)
        zprop[k] = rho * z[k] + beta * xi[k];
      prop = sampler.from_latent(zprop);
    } else {
      for (std::size_t k = 0; k < d; ++k)
        prop[k] = c[k] + rho * (x[k] - c[k]) + beta * tau[k] * xi[k];
      in_support = spec.in_support(prop);
    }
    bool accepted = false;
    if (beta == 0.0) {
      accepted = true;  // proposal equals the current state
    } else if (in_support) {
      const double phi_p = phi(prop);
      double delta = phi_x - phi_p;
      if (std::isnan(delta))
        delta = -700.0;
      delta = std::clamp(delta, -700.0, 700.0);
      if (std::log(u) < delta) {
        accepted = true;
        x = prop;
        if (latent)
          z = zprop;
        phi_x = phi_p;
      }
    } else {
      ++out.support_rejections;
    }
    out.trace.push_back({x, phi_x, accepted});
    ++out.state.steps;
    out.state.accepts += accepted;

    if (opts.adapt && step < opts.burn_in) {
      ++window_steps;
      window_accepts += accepted;
      if (window_steps == opts.adapt_interval) {
        const double rate = double(window_accepts) / double(window_steps);
        if (rate < opts.target_low)
          beta *= 0.8;
        else if (rate > opts.target_high)
          beta = std::min(1.0, beta * 1.25);
        window_steps = window_accepts = 0;
      }
    }
  }
  out.state.coords = x;
  out.state.phi = phi_x;
  out.state.beta = beta;
  return out;
}

ChainResult pcn_chain(const PriorSpec& spec, const Potential& pot, PcnOptions opts, Philox& rng,
                      std::span<const double> init) {
  return pcn_chain(
      spec, [&](std::span<const double> x) { return pot(spec.family.velocity(x)); }, opts, rng, init);
}

std::string chain_trace_csv(const ChainResult& chain) {
  std::string s = "step,accepted,phi";
  const std::size_t d = chain.state.coords.size();
  for (std::size_t k = 0; k < d; ++k)
    s += ",p" + std::to_string(k);
  s += '\n';
  for (std::size_t i = 0; i < chain.trace.size(); ++i) {
    const auto& st = chain.trace[i];
    s += std::to_string(i) + ',' + (st.accepted ? "1" : "0") + ',' + format_double(st.phi);
    for (double v : st.coords)
      s += ',' + format_double(v);
    s += '\n';
  }
  return s;
}

} // namespace passive
