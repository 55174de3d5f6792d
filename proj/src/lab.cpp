#include "passive/lab.hpp"

#include "passive/errors.hpp"
#include "passive/field_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>

namespace passive {

using ojson = nlohmann::ordered_json;

std::string ExperimentRecord::to_json() const {
  ojson j;
  j["id"] = id;
  j["seeds"] = {{"design", design_seed}, {"noise", noise_seed}, {"chain", chain_seeds}};
  j["config"] = config;
  j["schedule"] = schedule;
  j["summaries"] = summaries;
  j["warnings"] = warnings;
  j["solves"] = solves;
  j["timestamp"] = {{"started", started}, {"wall_clock_seconds", wall_clock_seconds}};
  return j.dump(2) + "\n";
}

ExperimentRecord ExperimentRecord::from_json(const std::string& text) {
  ExperimentRecord r;
  try {
    const auto j = ojson::parse(text);
    r.id = j.at("id").get<std::string>();
    r.design_seed = j.at("seeds").at("design").get<std::uint64_t>();
    r.noise_seed = j.at("seeds").at("noise").get<std::uint64_t>();
    r.chain_seeds = j.at("seeds").at("chain").get<std::vector<std::uint64_t>>();
    r.config = j.at("config");
    r.schedule = j.at("schedule").get<std::vector<std::size_t>>();
    r.summaries = j.at("summaries");
    r.warnings = j.value("warnings", std::vector<std::string>{});
    r.solves = j.value("solves", std::size_t{0});
    if (j.contains("timestamp")) {
      r.started = j["timestamp"].value("started", "");
      r.wall_clock_seconds = j["timestamp"].value("wall_clock_seconds", 0.0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed experiment record: ") + e.what());
  }
  return r;
}

std::string ExperimentRecord::summary_csv() const {
  if (summaries.empty())
    return "";
  std::vector<std::string> cols;
  for (const auto& [k, v] : summaries.front().items())
    if (v.is_primitive())
      cols.push_back(k);
  std::ostringstream os;
  for (std::size_t i = 0; i < cols.size(); ++i)
    os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& s : summaries) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      os << (i ? "," : "");
      if (s.contains(cols[i])) {
        const auto& v = s[cols[i]];
        os << (v.is_string() ? v.get<std::string>() : v.dump());
      }
    }
    os << '\n';
  }
  return os.str();
}

double median(std::vector<double> x) {
  if (x.empty())
    return std::nan("");
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double decay_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= double(n);
  my /= double(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return -sxy / sxx;
}

XDeltaProbe::XDeltaProbe(const FourierVelocityField& v_star, ICPair ics, SolverConfig config)
    : ics_(std::move(ics)), config_(config), reference_(paired_solve(v_star, ics_, config_)) {}

double XDeltaProbe::distance(const FourierVelocityField& v) const {
  return paired_distance_L2(reference_, paired_solve(v, ics_, config_));
}

InjectivityReport injectivity_probe(const std::vector<FourierVelocityField>& v_grid, const ICPair& ics,
                                    const SolverConfig& config, double tol, SobolevIndex s, bool allow_degenerate) {
  if (!allow_degenerate && !check_spanning(ics).pass)
    throw ConfigError("injectivity probe needs an initial condition pair that passes the spanning check");
  std::vector<TrajectoryPair> trajs;
  trajs.reserve(v_grid.size());
  for (const auto& v : v_grid)
    trajs.push_back(paired_solve(v, ics, config));
  InjectivityReport r;
  r.min_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v_grid.size(); ++i)
    for (std::size_t j = i + 1; j < v_grid.size(); ++j) {
      if (distance_H(v_grid[i], v_grid[j], s) < tol)
        continue;
      ++r.pairs_checked;
      const double d = paired_distance_L2(trajs[i], trajs[j]);
      const double d2 = paired_distance_L2(trajs[i], trajs[j], 2);
      r.max_quadrature_error = std::max(r.max_quadrature_error, std::abs(d - d2) / 3.0);
      if (d < r.min_distance) {
        r.min_distance = d;
        r.min_i = i;
        r.min_j = j;
      }
    }
  if (r.pairs_checked == 0)
    r.min_distance = 0.0;
  r.margin = r.max_quadrature_error > 0.0 ? r.min_distance / r.max_quadrature_error
                                          : (r.min_distance > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  r.pass = r.pairs_checked > 0 && r.min_distance > 0.0 && r.margin >= 10.0;
  return r;
}

namespace {

std::string now_iso() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
  std::chrono::steady_clock::time_point start_;
};

ExperimentRecord new_record(const std::string& id, const RunConfig& cfg, std::vector<std::size_t> schedule) {
  ExperimentRecord r;
  r.id = id;
  r.design_seed = cfg.design_seed;
  r.noise_seed = cfg.noise_seed;
  r.config = to_json(cfg);
  r.schedule = std::move(schedule);
  r.started = now_iso();
  return r;
}

std::size_t points_for(std::size_t n_data, DataLayout layout) {
  return layout == DataLayout::same_point ? (n_data + 1) / 2 : n_data;
}

double h_distance(const ParameterFamily& fam, std::span<const double> a, std::span<const double> b, SobolevIndex s) {
  const Eigen::MatrixXd G = fam.gram(s);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(Eigen::Index(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k)
    d(Eigen::Index(k)) = a[k] - b[k];
  return std::sqrt(std::max(0.0, d.dot(G * d)));
}

void check_budget(double estimate, const RunConfig& cfg, const std::string& what) {
  if (estimate > cfg.max_solves) {
    std::ostringstream os;
    os << what << " refused: estimated " << std::llround(estimate) << " paired solves exceeds max_solves "
       << std::llround(cfg.max_solves);
    throw BudgetError(os.str());
  }
}

/// Data for one replicate: a max-size design whose prefixes serve every N.
struct Replicate {
  std::unique_ptr<ForwardModel> model;
  ObservationSet obs;
};

Replicate make_replicate(const RunConfig& cfg, std::size_t r, std::size_t n_data, const ICPair& ics,
                         DataLayout layout, bool allow_degenerate, const FourierVelocityField& v_star) {
  Replicate rep;
  auto design = sample_design(points_for(n_data, layout), cfg.solver.T, cfg.design_seed + r);
  rep.model = std::make_unique<ForwardModel>(std::move(design), ics, cfg.solver, layout, allow_degenerate);
  rep.obs = synthesize_data(*rep.model, v_star, cfg.sigma_eta, cfg.noise_seed + r);
  return rep;
}

/// Potential at a coordinate vector for the first n data values, caching
/// predictions so prefixes reuse longer solves.
class CachedPotential {
public:
  CachedPotential(const ParameterFamily& fam, const Replicate& rep) : fam_(fam), rep_(rep) {}

  double operator()(std::span<const double> x, std::size_t n) {
    std::vector<double> key(x.begin(), x.end());
    {
      std::lock_guard lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end() && it->second.size() >= n)
        return misfit(std::span(rep_.obs.Y).first(n), std::span(it->second).first(n), rep_.obs.sigma_eta);
    }
    auto G = rep_.model->prefix(fam_.velocity(x), n);
    const double phi = misfit(std::span(rep_.obs.Y).first(n), G, rep_.obs.sigma_eta);
    std::lock_guard lock(mutex_);
    ++solves_;
    auto& slot = cache_[key];
    if (slot.size() < G.size())
      slot = std::move(G);
    return phi;
  }

  std::size_t solves() const { return solves_; }

private:
  const ParameterFamily& fam_;
  const Replicate& rep_;
  std::mutex mutex_;
  std::map<std::vector<double>, std::vector<double>> cache_;
  std::size_t solves_ = 0;
};

/// Quadrature posteriors for every replicate and N (N in schedule order).
struct PosteriorSchedule {
  std::vector<std::vector<QuadratureResult>> results;  // [replicate][N index]
  std::size_t solves = 0;
};

PosteriorSchedule compute_posterior_schedule(const RunConfig& cfg, const PriorSpec& prior,
                                             const FourierVelocityField& v_star, std::size_t replicates) {
  const auto ics = cfg.ics();
  const auto opts = cfg.quadrature_options();
  const std::size_t n_max = *std::max_element(cfg.N_schedule.begin(), cfg.N_schedule.end());
  const double nodes = std::pow(double(opts.grid_per_dim), double(prior.dim()));
  check_budget(double(replicates) * nodes * (1.0 + double(cfg.N_schedule.size()) * std::min(opts.max_levels, 4)),
               cfg, "posterior schedule");

  PosteriorSchedule out;
  out.results.resize(replicates);
  // largest N first so the shared first grid is solved at full length once
  std::vector<std::size_t> order(cfg.N_schedule.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cfg.N_schedule[a] > cfg.N_schedule[b]; });
  for (std::size_t r = 0; r < replicates; ++r) {
    const auto rep = make_replicate(cfg, r, n_max, ics, cfg.layout, cfg.allow_degenerate, v_star);
    CachedPotential pot(prior.family, rep);
    out.results[r].resize(cfg.N_schedule.size());
    for (std::size_t i : order) {
      const std::size_t n = cfg.N_schedule[i];
      out.results[r][i] = quadrature_posterior(
          prior, [&](std::span<const double> x) { return pot(x, n); }, opts);
    }
    out.solves += pot.solves();
  }
  return out;
}

std::mutex schedule_mutex;
std::map<std::string, std::shared_ptr<const PosteriorSchedule>> schedule_cache;

std::shared_ptr<const PosteriorSchedule> posterior_schedule(const RunConfig& cfg, const PriorSpec& prior,
                                                            const FourierVelocityField& v_star,
                                                            std::size_t replicates) {
  auto j = to_json(cfg);
  j.erase("experiments");
  std::ostringstream key;
  key << j.dump() << '|' << replicates << '|';
  for (Complex a : v_star.amps())
    key << format_double(a.real()) << ',' << format_double(a.imag()) << ';';
  {
    std::lock_guard lock(schedule_mutex);
    auto it = schedule_cache.find(key.str());
    if (it != schedule_cache.end())
      return it->second;
  }
  auto s = std::make_shared<const PosteriorSchedule>(compute_posterior_schedule(cfg, prior, v_star, replicates));
  std::lock_guard lock(schedule_mutex);
  schedule_cache[key.str()] = s;
  return s;
}

/// Paired distances to v_star's trajectories, cached by coordinates.
class DistanceCache {
public:
  DistanceCache(const ParameterFamily& fam, const FourierVelocityField& v_star, const ICPair& ics,
                const SolverConfig& config)
      : fam_(fam), probe_(v_star, ics, config) {}

  double operator()(std::span<const double> x) {
    std::vector<double> key(x.begin(), x.end());
    auto it = cache_.find(key);
    if (it != cache_.end())
      return it->second;
    ++solves_;
    const double d = probe_.distance(fam_.velocity(x));
    cache_.emplace(std::move(key), d);
    return d;
  }

  std::size_t solves() const { return solves_; }

private:
  const ParameterFamily& fam_;
  XDeltaProbe probe_;
  std::map<std::vector<double>, double> cache_;
  std::size_t solves_ = 0;
};

ojson contraction_summaries(const RunConfig& cfg, const PriorSpec& prior, std::span<const double> v_star,
                            const PosteriorSchedule& sched) {
  ojson out = ojson::array();
  const auto& fam = prior.family;
  for (double eps : cfg.eps_list)
    for (std::size_t i = 0; i < cfg.N_schedule.size(); ++i) {
      std::vector<double> masses, dists, discarded;
      for (const auto& rep : sched.results) {
        const auto& q = rep[i];
        masses.push_back(q.ball_mass(v_star, eps, cfg.sobolev.H()));
        const auto m = q.mean();
        dists.push_back(h_distance(fam, m, v_star, cfg.sobolev.H()));
        discarded.push_back(q.discarded_mass);
      }
      out.push_back({{"eps", eps},
                     {"N", cfg.N_schedule[i]},
                     {"mass_median", median(masses)},
                     {"mean_distance_median", median(dists)},
                     {"max_discarded_mass", *std::max_element(discarded.begin(), discarded.end())},
                     {"masses", masses},
                     {"mean_distances", dists}});
    }
  return out;
}

std::vector<double> star_coords(const RunConfig& cfg) { return cfg.v_star; }

} // namespace

ExperimentRecord contraction_experiment(const RunConfig& cfg) {
  cfg.validate();
  Stopwatch sw;
  auto rec = new_record("contraction", cfg, cfg.N_schedule);
  const auto prior = cfg.prior();
  const auto vs = star_coords(cfg);
  if (!prior.in_support(vs))
    rec.warnings.push_back("v_star lies outside the prior support: the prior gives no mass to its neighbourhood, "
                           "so the posterior cannot contract there");
  const auto sched = posterior_schedule(cfg, prior, prior.family.velocity(vs), cfg.replicates);
  rec.summaries = contraction_summaries(cfg, prior, vs, *sched);
  rec.solves = sched->solves;
  rec.wall_clock_seconds = sw.seconds();
  return rec;
}

ExperimentRecord negative_control_experiment(const RunConfig& cfg) {
  cfg.validate();
  Stopwatch sw;
  RunConfig c = cfg;
  const auto prior = cfg.prior();
  // push v_star radially to 1.5 times the prior radius
  const auto center = prior.center_coords();
  std::vector<double> dir(center.size());
  for (std::size_t k = 0; k < dir.size(); ++k)
    dir[k] = cfg.v_star[k] - center[k];
  double norm = prior.v_distance(cfg.v_star);
  if (norm == 0.0) {
    dir.assign(dir.size(), 0.0);
    dir[0] = 1.0;
    norm = prior.v_distance([&] {
      auto x = center;
      x[0] += 1.0;
      return x;
    }());
  }
  for (std::size_t k = 0; k < dir.size(); ++k)
    c.v_star[k] = center[k] + 1.5 * std::max(prior.radius, 1e-3) * dir[k] / norm;
  c.replicates = 1;
  auto rec = new_record("negative-control", c, c.N_schedule);
  rec.warnings.push_back("v_star lies outside the prior support: the prior gives no mass to its neighbourhood, "
                         "so the posterior cannot contract there");
  const auto sched = posterior_schedule(c, prior, prior.family.velocity(c.v_star), 1);
  rec.summaries = contraction_summaries(c, prior, c.v_star, *sched);
  rec.solves = sched->solves;
  rec.wall_clock_seconds = sw.seconds();
  return rec;
}

ExperimentRecord identification_experiment(const RunConfig& cfg) {
  cfg.validate();
  Stopwatch sw;
  auto rec = new_record("identification", cfg, cfg.N_schedule);
  const auto prior = cfg.prior();
  const auto& fam = prior.family;
  const auto vs = star_coords(cfg);
  const auto v_star = fam.velocity(vs);
  const auto sched = posterior_schedule(cfg, prior, v_star, cfg.replicates);
  DistanceCache dist(fam, v_star, cfg.ics(), cfg.distance_solver());

  // prior (N = 0) on the first grid, no zoom
  auto popts = cfg.quadrature_options();
  popts.zoom = false;
  const auto prior_q = quadrature_posterior(prior, [](std::span<const double>) { return 0.0; }, popts);
  std::vector<double> node_dist(prior_q.nodes.size());
  for (std::size_t i = 0; i < node_dist.size(); ++i)
    node_dist[i] = dist(prior_q.nodes[i]);

  for (double delta : cfg.delta_list) {
    double prior_mass = 0.0;
    for (std::size_t i = 0; i < node_dist.size(); ++i)
      if (node_dist[i] < delta)
        prior_mass += prior_q.prior_weights[i];
    rec.summaries.push_back({{"kind", "x_delta"},
                             {"delta", delta},
                             {"N", 0},
                             {"mass_median", prior_mass},
                             {"masses", std::vector<double>(sched->results.size(), prior_mass)}});
    for (std::size_t i = 0; i < cfg.N_schedule.size(); ++i) {
      std::vector<double> masses;
      for (const auto& rep : sched->results)
        masses.push_back(rep[i].mass_where([&](std::span<const double> x) { return dist(x) < delta; }));
      rec.summaries.push_back({{"kind", "x_delta"},
                               {"delta", delta},
                               {"N", cfg.N_schedule[i]},
                               {"mass_median", median(masses)},
                               {"masses", masses}});
    }
  }
  // largest delta with {D < delta} inside the H-ball of radius eps, on the first grid
  for (double eps : cfg.eps_list) {
    double delta_star = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node_dist.size(); ++i)
      if (h_distance(fam, prior_q.nodes[i], vs, cfg.sobolev.H()) >= eps)
        delta_star = std::min(delta_star, node_dist[i]);
    rec.summaries.push_back({{"kind", "delta_star"},
                             {"eps", eps},
                             {"delta_star", std::isfinite(delta_star) ? delta_star : -1.0},
                             {"nodes", prior_q.nodes.size()}});
  }
  rec.solves = sched->solves + dist.solves();
  rec.wall_clock_seconds = sw.seconds();
  return rec;
}

namespace {

struct NetData {
  std::vector<std::vector<double>> net;  // coordinates
  std::vector<double> d2;                // paired distance squared to v_star
};

std::vector<std::vector<double>> square_net(std::span<const double> c, double spacing, std::vector<double> offsets) {
  std::vector<std::vector<double>> net;
  if (c.size() == 1) {
    for (double a : offsets)
      net.push_back({c[0] + a * spacing});
    return net;
  }
  for (double a : offsets)
    for (double b : offsets) {
      std::vector<double> x(c.begin(), c.end());
      x[0] += a * spacing;
      x[1] += b * spacing;
      net.push_back(x);
    }
  return net;
}

} // namespace

ExperimentRecord decomposition_experiment(const RunConfig& cfg) {
  cfg.validate();
  Stopwatch sw;
  auto rec = new_record("decomposition", cfg, cfg.decomposition_schedule);
  const auto prior = cfg.prior();
  const auto& fam = prior.family;
  const auto vs = star_coords(cfg);
  const auto v_star = fam.velocity(vs);
  const auto ics = cfg.ics();
  const auto net = square_net(vs, cfg.net_spacing, {-1.0, 0.0, 1.0});
  check_budget(double(cfg.decomposition_replicates * (net.size() + 1) + net.size()), cfg, "decomposition");

  XDeltaProbe probe(v_star, ics, cfg.distance_solver());
  std::vector<double> d2(net.size());
  for (std::size_t i = 0; i < net.size(); ++i)
    d2[i] = std::pow(probe.distance(fam.velocity(net[i])), 2);

  const auto& sched = cfg.decomposition_schedule;
  const std::size_t n_max = *std::max_element(sched.begin(), sched.end());
  const double T = cfg.solver.T;
  const double s2 = cfg.sigma_eta * cfg.sigma_eta;
  std::vector<std::vector<double>> sup(sched.size());  // [N][replicate]
  for (std::size_t r = 0; r < cfg.decomposition_replicates; ++r) {
    const auto rep = make_replicate(cfg, r, n_max, ics, cfg.layout, cfg.allow_degenerate, v_star);
    std::vector<std::vector<double>> G(net.size());
    parallel_for(net.size(), cfg.threads, [&](std::size_t i) { G[i] = rep.model->prefix(fam.velocity(net[i]), n_max); });
    for (std::size_t a = 0; a < sched.size(); ++a) {
      const std::size_t n = sched[a];
      double s = 0.0;
      for (std::size_t i = 0; i < net.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          acc += std::pow(rep.obs.Y[j] - G[i][j], 2);
        s = std::max(s, std::abs(acc / double(n) - (s2 + d2[i] / (2.0 * T))));
      }
      sup[a].push_back(s);
    }
  }
  std::vector<double> xs, meds;
  for (std::size_t a = 0; a < sched.size(); ++a) {
    xs.push_back(double(sched[a]));
    meds.push_back(median(sup[a]));
    rec.summaries.push_back({{"kind", "residual"}, {"N", sched[a]}, {"sup_median", meds.back()}, {"sup", sup[a]}});
  }
  rec.summaries.push_back({{"kind", "fit"}, {"decay_exponent", decay_exponent(xs, meds)}, {"net_size", net.size()}});
  rec.solves = cfg.decomposition_replicates * (net.size() + 1) + net.size() + 1;
  rec.wall_clock_seconds = sw.seconds();
  return rec;
}

ExperimentRecord ulln_experiment(const RunConfig& cfg) {
  cfg.validate();
  Stopwatch sw;
  auto rec = new_record("ulln", cfg, cfg.decomposition_schedule);
  const auto prior = cfg.prior();
  const auto& fam = prior.family;
  const auto vs = star_coords(cfg);
  const auto v_star = fam.velocity(vs);
  const auto ics = cfg.ics();
  const auto net = square_net(vs, cfg.net_spacing, {-1.5, -0.5, 0.5, 1.5});
  check_budget(double(cfg.decomposition_replicates * (net.size() + 1)), cfg, "ulln");

  const auto& sched = cfg.decomposition_schedule;
  const std::size_t n_max = *std::max_element(sched.begin(), sched.end());
  std::vector<std::vector<double>> sup(sched.size());
  for (std::size_t r = 0; r < cfg.decomposition_replicates; ++r) {
    const auto rep = make_replicate(cfg, r, n_max, ics, cfg.layout, cfg.allow_degenerate, v_star);
    std::vector<std::vector<double>> G(net.size());
    parallel_for(net.size(), cfg.threads, [&](std::size_t i) { G[i] = rep.model->prefix(fam.velocity(net[i]), n_max); });
    for (std::size_t a = 0; a < sched.size(); ++a) {
      const std::size_t n = sched[a];
      double s = 0.0;
      for (std::size_t i = 0; i < net.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          acc += (rep.obs.Y[j] - rep.obs.G_true[j]) * (rep.obs.G_true[j] - G[i][j]);
        s = std::max(s, std::abs(acc / double(n)));
      }
      sup[a].push_back(s);
    }
  }
  for (std::size_t a = 0; a < sched.size(); ++a)
    rec.summaries.push_back({{"N", sched[a]}, {"sup_median", median(sup[a])}, {"sup", sup[a]}});
  rec.solves = cfg.decomposition_replicates * (net.size() + 1);
  rec.wall_clock_seconds = sw.seconds();
  return rec;
}

namespace {

double max_trajectory_gap(const ScalarTrajectory& a, const ScalarTrajectory& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.snapshots.size(); ++i)
    gap = std::max(gap, sup_norm(a.snapshots[i].theta - b.snapshots[i].theta));
  return gap;
}

} // namespace

ExperimentRecord illposedness_demo(const RunConfig& cfg) {
  cfg.validate();
  Stopwatch sw;
  const std::size_t n = *std::max_element(cfg.N_schedule.begin(), cfg.N_schedule.end());
  auto rec = new_record("illposedness", cfg, {n});
  const auto sc = cfg.distance_solver();

  // radial case: the flow is tangent to the level sets of theta0
  const auto theta0 = sine_x1() + sine_x2();
  std::vector<ScalarTrajectory> radial;
  for (double c : {0.0, 1.0, 5.0})
    radial.push_back(solve(c * radial_symmetric_flow(), theta0, sc));
  double radial_gap = 0.0;
  for (std::size_t i = 0; i < radial.size(); ++i)
    for (std::size_t j = i + 1; j < radial.size(); ++j)
      radial_gap = std::max(radial_gap, max_trajectory_gap(radial[i], radial[j]));
  rec.summaries.push_back({{"kind", "radial_trajectory_gap"}, {"value", radial_gap}});

  // laminar case: theta0 depends on x1 only, the flow is along x2
  const auto lam1 = solve(shear_y(), sine_x1(), sc);
  const auto lam2 = solve(2.0 * shear_y(), sine_x1(), sc);
  rec.summaries.push_back({{"kind", "laminar_trajectory_gap"}, {"value", max_trajectory_gap(lam1, lam2)}});

  // single-IC versus two-IC posteriors over the radial family c * flow
  PriorSpec prior;
  prior.family = family_preset("radial");
  prior.radius = cfg.prior_radius;
  prior.sobolev = cfg.sobolev;
  const std::vector<double> c_star = {0.5 * prior.box().second[0]};
  const auto v_star = prior.family.velocity(c_star);
  const auto opts = cfg.quadrature_options();

  auto single_design = sample_design(n, cfg.solver.T, cfg.design_seed);
  ForwardModel single(single_design, ic_pair_preset("radial-single"), cfg.solver, DataLayout::alternate, true);
  const auto single_obs = synthesize_data(single, v_star, cfg.sigma_eta, cfg.noise_seed);
  const auto q1 = quadrature_posterior(
      prior, [&](std::span<const double> x) { return misfit(single_obs.Y, single(prior.family.velocity(x)), cfg.sigma_eta); },
      opts);

  auto paired_design = sample_design(points_for(n, DataLayout::same_point), cfg.solver.T, cfg.design_seed);
  ForwardModel paired(paired_design, canonical_ic_pair(), cfg.solver);
  const auto paired_obs = synthesize_data(paired, v_star, cfg.sigma_eta, cfg.noise_seed);
  const auto q2 = quadrature_posterior(
      prior,
      [&](std::span<const double> x) {
        return misfit(paired_obs.Y, paired.prefix(prior.family.velocity(x), n), cfg.sigma_eta);
      },
      opts);

  const double eps = cfg.eps_list.front();
  rec.summaries.push_back({{"kind", "single_ic"},
                           {"N", n},
                           {"c_star", c_star[0]},
                           {"tv_to_prior", q1.tv_to_prior()},
                           {"ball_mass", q1.ball_mass(c_star, eps, cfg.sobolev.H())},
                           {"prior_ball_mass", q1.prior_mass_where([&](std::span<const double> x) {
                              return h_distance(prior.family, x, c_star, cfg.sobolev.H()) <= eps;
                            })}});
  rec.summaries.push_back({{"kind", "two_ic"},
                           {"N", n},
                           {"c_star", c_star[0]},
                           {"tv_to_prior", q2.tv_to_prior()},
                           {"ball_mass", q2.ball_mass(c_star, eps, cfg.sobolev.H())},
                           {"mean", q2.mean()[0]}});
  rec.solves = 3 + 2 + q1.evaluations + q2.evaluations;
  rec.wall_clock_seconds = sw.seconds();
  return rec;
}

ExperimentRecord injectivity_experiment(const RunConfig& cfg) {
  cfg.validate();
  Stopwatch sw;
  auto rec = new_record("injectivity", cfg, {});
  const auto sc = cfg.distance_solver();
  const std::vector<double> offsets = {-0.6, -0.3, 0.0, 0.3, 0.6};
  auto grid_of = [&](const ParameterFamily& fam) {
    std::vector<FourierVelocityField> g;
    for (const auto& x : square_net(std::vector<double>(fam.dim(), 0.0), 1.0, offsets))
      g.push_back(fam.velocity(x));
    return g;
  };
  const auto fam = cfg.parameter_family();
  const auto grid = grid_of(fam);
  const auto ok = injectivity_probe(grid, cfg.ics(), sc, 1e-12, cfg.sobolev.H());
  rec.summaries.push_back({{"kind", "spanning"},
                           {"ic_pair", cfg.ics().id},
                           {"family", fam.name()},
                           {"grid_size", grid.size()},
                           {"pairs", ok.pairs_checked},
                           {"min_distance", ok.min_distance},
                           {"min_pair_i", ok.min_i},
                           {"min_pair_j", ok.min_j},
                           {"max_quadrature_error", ok.max_quadrature_error},
                           {"margin", ok.margin},
                           {"pass", ok.pass}});
  const auto lam = family_preset("laminar2");
  const auto lam_grid = grid_of(lam);
  const auto bad = injectivity_probe(lam_grid, ic_pair_preset("identical"), sc, 1e-12, cfg.sobolev.H(), true);
  rec.summaries.push_back({{"kind", "failing_control"},
                           {"ic_pair", "identical"},
                           {"family", lam.name()},
                           {"grid_size", lam_grid.size()},
                           {"pairs", bad.pairs_checked},
                           {"min_distance", bad.min_distance},
                           {"min_pair_i", bad.min_i},
                           {"min_pair_j", bad.min_j},
                           {"max_quadrature_error", bad.max_quadrature_error},
                           {"margin", bad.margin},
                           {"pass", bad.pass}});
  rec.solves = grid.size() + lam_grid.size();
  rec.wall_clock_seconds = sw.seconds();
  return rec;
}

void clear_experiment_cache() {
  std::lock_guard lock(schedule_mutex);
  schedule_cache.clear();
}

ExperimentRecord run_experiment(const std::string& id, const RunConfig& cfg) {
  if (id == "contraction")
    return contraction_experiment(cfg);
  if (id == "identification")
    return identification_experiment(cfg);
  if (id == "decomposition")
    return decomposition_experiment(cfg);
  if (id == "ulln")
    return ulln_experiment(cfg);
  if (id == "illposedness")
    return illposedness_demo(cfg);
  if (id == "injectivity")
    return injectivity_experiment(cfg);
  if (id == "negative-control")
    return negative_control_experiment(cfg);
  throw ConfigError("unknown experiment '" + id + "'");
}

ExperimentRecord replay(const ExperimentRecord& record, int threads) {
  clear_experiment_cache();
  RunConfig cfg = parse_run_config(nlohmann::json::parse(record.config.dump()));
  cfg.threads = threads;
  if (record.id == "negative-control") {
    // the record stores the already-shifted v_star; rerun it as a contraction
    auto r = contraction_experiment([&] {
      auto c = cfg;
      c.replicates = 1;
      return c;
    }());
    r.id = record.id;
    r.warnings = record.warnings;
    return r;
  }
  return run_experiment(record.id, cfg);
}

namespace {

bool json_close(const ojson& a, const ojson& b, double tol, const std::string& path, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why)
      *why = path + ": " + msg;
    return false;
  };
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    if (x == y || std::abs(x - y) <= tol * std::max(1.0, std::abs(x)))
      return true;
    return fail(a.dump() + " vs " + b.dump());
  }
  if (a.type() != b.type())
    return fail("type differs");
  if (a.is_array()) {
    if (a.size() != b.size())
      return fail("length differs");
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!json_close(a[i], b[i], tol, path + "[" + std::to_string(i) + "]", why))
        return false;
    return true;
  }
  if (a.is_object()) {
    if (a.size() != b.size())
      return fail("key count differs");
    for (const auto& [k, v] : a.items()) {
      if (!b.contains(k))
        return fail("missing key " + k);
      if (!json_close(v, b[k], tol, path + "." + k, why))
        return false;
    }
    return true;
  }
  return a == b ? true : fail(a.dump() + " vs " + b.dump());
}

} // namespace

bool summaries_match(const ExperimentRecord& a, const ExperimentRecord& b, double tol, std::string* why) {
  if (a.id != b.id) {
    if (why)
      *why = "experiment ids differ";
    return false;
  }
  return json_close(a.summaries, b.summaries, tol, "summaries", why);
}

} // namespace passive
