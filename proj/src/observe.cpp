#include "passive/observe.hpp"

#include "passive/errors.hpp"
#include "passive/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace passive {

ObservationDesign sample_design(std::size_t N, double T, std::uint64_t seed) {
  if (N == 0)
    throw ConfigError("sample_design: N must be at least 1");
  if (!(T > 0.0))
    throw ConfigError("sample_design: T must be positive");
  Philox rng(seed, "design");
  ObservationDesign d;
  d.seed = seed;
  d.T = T;
  d.points.resize(N);
  for (auto& p : d.points) {
    p.t = T * rng.uniform();
    p.x.x1 = rng.uniform();
    p.x.x2 = rng.uniform();
  }
  return d;
}

ObservationSet ObservationSet::prefix(std::size_t n) const {
  if (n > size())
    throw ConfigError("prefix longer than the observation set");
  ObservationSet out;
  out.layout = layout;
  out.sigma_eta = sigma_eta;
  out.noise_seed = noise_seed;
  out.design.seed = design.seed;
  out.design.T = design.T;
  const std::size_t points = n == 0 ? 0 : point_of(n - 1) + 1;
  out.design.points.assign(design.points.begin(), design.points.begin() + long(points));
  out.G_true.assign(G_true.begin(), G_true.begin() + long(std::min(n, G_true.size())));
  out.Y.assign(Y.begin(), Y.begin() + long(n));
  return out;
}

SpanningReport check_spanning(const ICPair& ics, int grid_n, SpanningOptions opts) {
  const int K = std::max(ics.first.K(), ics.second.K());
  const auto a = ics.first.embedded(K);
  const auto b = ics.second.embedded(K);
  auto [a1, a2] = gradient(a);
  auto [b1, b2] = gradient(b);
  const int n = std::max(grid_n, 2 * K + 1);
  const auto ga1 = synthesize(a1, n), ga2 = synthesize(a2, n);
  const auto gb1 = synthesize(b1, n), gb2 = synthesize(b2, n);
  SpanningReport r;
  std::vector<double> d(ga1.size());
  r.min_abs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.size(); ++i) {
    // (grad a)^perp = (-a2, a1)
    d[i] = std::abs(-ga2[i] * gb1[i] + ga1[i] * gb2[i]);
    r.min_abs = std::min(r.min_abs, d[i]);
    r.max_abs = std::max(r.max_abs, d[i]);
  }
  const double tol = opts.tol_rel * r.max_abs;
  std::size_t below = 0;
  for (double x : d)
    if (!(x > tol))
      ++below;
  r.fraction_below = double(below) / double(d.size());
  r.max_fraction = std::min(1.0, 4.0 * opts.zero_curves * double(n) / (double(n) * n));
  r.pass = r.max_abs > 0.0 && r.fraction_below <= r.max_fraction;
  return r;
}

ForwardModel::ForwardModel(ObservationDesign design, ICPair ics, SolverConfig config, DataLayout layout,
                           bool allow_degenerate)
    : design_(std::move(design)), ics_(std::move(ics)), config_(config), layout_(layout) {
  config_.validate();
  if (!allow_degenerate && !check_spanning(ics_).pass)
    throw ConfigError("initial condition pair '" + ics_.id +
                      "' fails the spanning condition; pass allow_degenerate for ill-posedness studies");
  for (const auto& p : design_.points)
    if (!(p.t >= 0.0 && p.t <= config_.T))
      throw ConfigError("design time outside [0, T]");
  order_.resize(design_.points.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return design_.points[a].t < design_.points[b].t; });
}

std::vector<double> ForwardModel::operator()(const FourierVelocityField& v) const { return prefix(v, size()); }

std::vector<double> ForwardModel::prefix(const FourierVelocityField& v, std::size_t n) const {
  std::vector<double> G(n);
  if (n == 0)
    return G;
  const bool paired = layout_ == DataLayout::same_point;
  const std::size_t points = paired ? (n + 1) / 2 : n;
  // time-sorted subset of the first `points` design points
  std::vector<std::size_t> order;
  order.reserve(points);
  for (std::size_t i : order_)
    if (i < points)
      order.push_back(i);
  std::vector<double> times;
  std::vector<std::size_t> group_start;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const double t = design_.points[order[r]].t;
    if (times.empty() || t != times.back()) {
      times.push_back(t);
      group_start.push_back(r);
    }
  }
  group_start.push_back(order.size());

  PointEvaluator eval(config_.K);
  for (int ic = 1; ic <= 2; ++ic) {
    // data index for (point i, ic): same_point -> 2i + ic - 1; alternate -> i when parity matches
    auto slot = [&](std::size_t i) -> std::size_t {
      if (paired)
        return 2 * i + std::size_t(ic - 1);
      return (i % 2 == std::size_t(ic - 1)) ? i : std::size_t(-1);
    };
    bool needed = false;
    for (std::size_t i = 0; i < points && !needed; ++i) {
      const std::size_t j = slot(i);
      needed = j != std::size_t(-1) && j < n;
    }
    if (!needed)
      continue;
    const FourierScalarField& theta0 = ic == 1 ? ics_.first : ics_.second;
    integrate(v, theta0, config_, times, [&](std::size_t g, double, std::span<const Complex> th) {
      for (std::size_t r = group_start[g]; r < group_start[g + 1]; ++r) {
        const std::size_t i = order[r];
        const std::size_t j = slot(i);
        if (j == std::size_t(-1) || j >= n)
          continue;
        eval.locate(design_.points[i].x);
        G[j] = eval.value(th);
      }
    });
  }
  return G;
}

std::vector<double> forward_map(const FourierVelocityField& v, const ObservationDesign& design, const ICPair& ics,
                                const SolverConfig& config, bool allow_degenerate) {
  return ForwardModel(design, ics, config, DataLayout::same_point, allow_degenerate)(v);
}

ObservationSet synthesize_data(const ForwardModel& model, const FourierVelocityField& v_star, double sigma_eta,
                               std::uint64_t noise_seed) {
  if (!(sigma_eta >= 0.0))
    throw ConfigError("sigma_eta must be nonnegative");
  ObservationSet obs;
  obs.design = model.design();
  obs.layout = model.layout();
  obs.sigma_eta = sigma_eta;
  obs.noise_seed = noise_seed;
  obs.G_true = model(v_star);
  obs.Y = obs.G_true;
  Philox rng(noise_seed, "noise");
  for (double& y : obs.Y)
    y += sigma_eta * rng.normal();
  return obs;
}

ObservationSet synthesize_data(const FourierVelocityField& v_star, const ObservationDesign& design, const ICPair& ics,
                               double sigma_eta, std::uint64_t noise_seed, const SolverConfig& config,
                               DataLayout layout, bool allow_degenerate) {
  return synthesize_data(ForwardModel(design, ics, config, layout, allow_degenerate), v_star, sigma_eta, noise_seed);
}

FourierScalarField sine_x1() {
  FourierScalarField f(1);
  f.set(1, 0, Complex(0.0, -0.5));
  return f;
}

FourierScalarField sine_x2() {
  FourierScalarField f(1);
  f.set(0, 1, Complex(0.0, -0.5));
  return f;
}

FourierScalarField sine_diagonal() {
  FourierScalarField f(1);
  f.set(1, 1, Complex(0.0, -0.5));
  return f;
}

ICPair canonical_ic_pair() { return {sine_x1(), sine_x2(), "canonical"}; }

ICPair ic_pair_preset(const std::string& name) {
  if (name == "canonical")
    return canonical_ic_pair();
  if (name == "diagonal")
    return {sine_x1(), sine_diagonal(), "diagonal"};
  if (name == "identical")
    return {sine_x1(), sine_x1(), "identical"};
  if (name == "radial-single")
    return {sine_x1() + sine_x2(), sine_x1() + sine_x2(), "radial-single"};
  throw ConfigError("unknown ic_pair preset '" + name + "'");
}

} // namespace passive
