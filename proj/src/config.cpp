#include "passive/config.hpp"

#include "passive/errors.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace passive {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "kappa", "T", "K", "dt_max", "grid_n", "checkpoint_spacing", "distance_spacing", "m", "m_star", "s_ic",
      "family", "K_param", "prior_kind", "prior_radius", "prior_center", "prior_tau0", "prior_alpha", "ic_pair",
      "ic_first", "ic_second", "layout", "allow_degenerate", "velocity", "v_star", "sigma_eta", "N", "N_schedule",
      "replicates", "design_seed", "noise_seed", "chain_seed", "eps_list", "delta_list", "pcn_beta", "pcn_steps",
      "pcn_burn_in", "pcn_adapt", "quad_grid", "quad_levels", "quad_zoom", "quadrature", "experiments",
      "decomposition_schedule", "decomposition_replicates", "net_spacing", "max_solves"};
  return keys;
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key))
    return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

FourierScalarField field_from_rows(const std::vector<std::array<double, 4>>& rows, const char* key) {
  int K = 0;
  for (const auto& r : rows)
    K = std::max({K, std::abs(int(r[0])), std::abs(int(r[1]))});
  FourierScalarField f(K);
  for (const auto& r : rows) {
    const int k1 = int(r[0]), k2 = int(r[1]);
    if (double(k1) != r[0] || double(k2) != r[1] || (k1 == 0 && k2 == 0))
      throw ConfigError(std::string("config key '") + key + "' needs nonzero integer wavevectors");
    f.set(k1, k2, Complex(r[2], r[3]));
  }
  return f;
}

} // namespace

void RunConfig::validate() const {
  auto need = [](bool ok, const char* key, const char* what) {
    if (!ok)
      throw ConfigError(std::string("config key '") + key + "' " + what);
  };
  need(solver.kappa > 0.0, "kappa", "must be positive");
  need(solver.T >= 0.0, "T", "must be nonnegative");
  need(solver.dt_max > 0.0, "dt_max", "must be positive");
  need(solver.K >= 1, "K", "must be at least 1");
  need(solver.grid_n >= 0, "grid_n", "must be nonnegative");
  need(solver.checkpoint_spacing >= 0.0, "checkpoint_spacing", "must be nonnegative");
  need(distance_spacing > 0.0 && distance_spacing <= 1.0, "distance_spacing", "must lie in (0, 1]");
  need(sobolev.m > 1.0, "m", "must exceed 1");
  need(sobolev.m_star > sobolev.m, "m_star", "must exceed m");
  need(sobolev.s_ic > 1.0 && sobolev.s_ic <= sobolev.m, "s_ic", "must lie in (1, m]");
  need(K_param >= 1, "K_param", "must be at least 1");
  need(prior_radius >= 0.0, "prior_radius", "must be nonnegative");
  need(prior_tau0 > 0.0, "prior_tau0", "must be positive");
  need(prior_kind != PriorKind::truncated_gaussian || prior_alpha > sobolev.m_star + 1.0, "prior_alpha",
       "must exceed m_star + 1");
  need(sigma_eta >= 0.0, "sigma_eta", "must be nonnegative");
  need(N >= 1, "N", "must be at least 1");
  need(!N_schedule.empty(), "N_schedule", "must not be empty");
  for (auto n : N_schedule)
    need(n >= 1, "N_schedule", "entries must be at least 1");
  need(replicates >= 1, "replicates", "must be at least 1");
  for (double e : eps_list)
    need(e > 0.0, "eps_list", "entries must be positive");
  for (double d : delta_list)
    need(d > 0.0, "delta_list", "entries must be positive");
  need(pcn_beta >= 0.0 && pcn_beta <= 1.0, "pcn_beta", "must lie in [0, 1]");
  need(quad_grid >= 17, "quad_grid", "must be at least 17");
  need(quad_levels >= 0, "quad_levels", "must be nonnegative");
  need(quadrature == "auto" || quadrature == "on" || quadrature == "off", "quadrature", "must be auto, on or off");
  need(decomposition_replicates >= 1, "decomposition_replicates", "must be at least 1");
  for (auto n : decomposition_schedule)
    need(n >= 2, "decomposition_schedule", "entries must be at least 2");
  need(net_spacing > 0.0, "net_spacing", "must be positive");
  need(max_solves > 0.0, "max_solves", "must be positive");
  need(threads >= 1, "threads", "must be at least 1");
  static const std::set<std::string> experiment_names = {"contraction",  "identification", "decomposition", "ulln",
                                                         "illposedness", "injectivity",    "negative-control"};
  for (const auto& e : experiments)
    need(experiment_names.count(e) == 1, "experiments", "names an unknown experiment");
  try {
    solver.validate();
    const auto fam = parameter_family();
    need(v_star.size() == fam.dim(), "v_star", "must have one entry per family coordinate");
    need(prior_center.empty() || prior_center.size() == fam.dim(), "prior_center",
         "must have one entry per family coordinate");
    ics();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

ParameterFamily RunConfig::parameter_family() const { return family_preset(family, K_param); }

PriorSpec RunConfig::prior() const {
  PriorSpec p;
  p.family = parameter_family();
  p.kind = prior_kind;
  p.radius = prior_radius;
  p.center = prior_center;
  p.tau0 = prior_tau0;
  p.alpha = prior_alpha;
  p.sobolev = sobolev;
  return p;
}

ICPair RunConfig::ics() const {
  if (ic_first.empty() && ic_second.empty())
    return ic_pair_preset(ic_pair);
  if (ic_first.empty() || ic_second.empty())
    throw ConfigError("config keys 'ic_first' and 'ic_second' must be given together");
  return {field_from_rows(ic_first, "ic_first"), field_from_rows(ic_second, "ic_second"), "custom"};
}

QuadratureOptions RunConfig::quadrature_options() const {
  QuadratureOptions q;
  q.grid_per_dim = quad_grid;
  q.max_levels = quad_levels;
  q.zoom = quad_zoom;
  q.threads = threads;
  return q;
}

PcnOptions RunConfig::pcn_options() const {
  PcnOptions o;
  o.beta = pcn_beta;
  o.n_steps = pcn_steps;
  o.burn_in = pcn_burn_in;
  o.adapt = pcn_adapt;
  return o;
}

SolverConfig RunConfig::distance_solver() const {
  SolverConfig s = solver;
  s.checkpoint_spacing = distance_spacing * solver.T;
  return s;
}

RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object())
    throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (known_keys().count(key) == 0)
      throw ConfigError("unknown config key '" + key + "'");
  if (!j.contains("kappa"))
    throw ConfigError("config key 'kappa' is required");
  if (!j.contains("T"))
    throw ConfigError("config key 'T' is required");
  RunConfig c;
  read(j, "kappa", c.solver.kappa);
  read(j, "T", c.solver.T);
  read(j, "K", c.solver.K);
  read(j, "dt_max", c.solver.dt_max);
  read(j, "grid_n", c.solver.grid_n);
  read(j, "checkpoint_spacing", c.solver.checkpoint_spacing);
  read(j, "distance_spacing", c.distance_spacing);
  read(j, "m", c.sobolev.m);
  read(j, "m_star", c.sobolev.m_star);
  read(j, "s_ic", c.sobolev.s_ic);
  read(j, "family", c.family);
  read(j, "K_param", c.K_param);
  std::string kind = "uniform_ball";
  read(j, "prior_kind", kind);
  if (kind == "uniform_ball")
    c.prior_kind = PriorKind::uniform_ball;
  else if (kind == "truncated_gaussian")
    c.prior_kind = PriorKind::truncated_gaussian;
  else
    throw ConfigError("config key 'prior_kind' must be uniform_ball or truncated_gaussian");
  read(j, "prior_radius", c.prior_radius);
  read(j, "prior_center", c.prior_center);
  read(j, "prior_tau0", c.prior_tau0);
  read(j, "prior_alpha", c.prior_alpha);
  read(j, "ic_pair", c.ic_pair);
  read(j, "ic_first", c.ic_first);
  read(j, "ic_second", c.ic_second);
  std::string layout = "same_point";
  read(j, "layout", layout);
  if (layout == "same_point")
    c.layout = DataLayout::same_point;
  else if (layout == "alternate")
    c.layout = DataLayout::alternate;
  else
    throw ConfigError("config key 'layout' must be same_point or alternate");
  read(j, "allow_degenerate", c.allow_degenerate);
  read(j, "velocity", c.velocity);
  read(j, "v_star", c.v_star);
  read(j, "sigma_eta", c.sigma_eta);
  read(j, "N", c.N);
  read(j, "N_schedule", c.N_schedule);
  read(j, "replicates", c.replicates);
  read(j, "design_seed", c.design_seed);
  read(j, "noise_seed", c.noise_seed);
  read(j, "chain_seed", c.chain_seed);
  read(j, "eps_list", c.eps_list);
  read(j, "delta_list", c.delta_list);
  read(j, "pcn_beta", c.pcn_beta);
  read(j, "pcn_steps", c.pcn_steps);
  read(j, "pcn_burn_in", c.pcn_burn_in);
  read(j, "pcn_adapt", c.pcn_adapt);
  read(j, "quad_grid", c.quad_grid);
  read(j, "quad_levels", c.quad_levels);
  read(j, "quad_zoom", c.quad_zoom);
  read(j, "quadrature", c.quadrature);
  read(j, "experiments", c.experiments);
  read(j, "decomposition_schedule", c.decomposition_schedule);
  read(j, "decomposition_replicates", c.decomposition_replicates);
  read(j, "net_spacing", c.net_spacing);
  read(j, "max_solves", c.max_solves);
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["kappa"] = c.solver.kappa;
  j["T"] = c.solver.T;
  j["K"] = c.solver.K;
  j["dt_max"] = c.solver.dt_max;
  j["grid_n"] = c.solver.grid_n;
  j["checkpoint_spacing"] = c.solver.checkpoint_spacing;
  j["distance_spacing"] = c.distance_spacing;
  j["m"] = c.sobolev.m;
  j["m_star"] = c.sobolev.m_star;
  j["s_ic"] = c.sobolev.s_ic;
  j["family"] = c.family;
  j["K_param"] = c.K_param;
  j["prior_kind"] = c.prior_kind == PriorKind::uniform_ball ? "uniform_ball" : "truncated_gaussian";
  j["prior_radius"] = c.prior_radius;
  j["prior_center"] = c.prior_center;
  j["prior_tau0"] = c.prior_tau0;
  j["prior_alpha"] = c.prior_alpha;
  j["ic_pair"] = c.ic_pair;
  j["ic_first"] = c.ic_first;
  j["ic_second"] = c.ic_second;
  j["layout"] = c.layout == DataLayout::same_point ? "same_point" : "alternate";
  j["allow_degenerate"] = c.allow_degenerate;
  j["velocity"] = c.velocity;
  j["v_star"] = c.v_star;
  j["sigma_eta"] = c.sigma_eta;
  j["N"] = c.N;
  j["N_schedule"] = c.N_schedule;
  j["replicates"] = c.replicates;
  j["design_seed"] = c.design_seed;
  j["noise_seed"] = c.noise_seed;
  j["chain_seed"] = c.chain_seed;
  j["eps_list"] = c.eps_list;
  j["delta_list"] = c.delta_list;
  j["pcn_beta"] = c.pcn_beta;
  j["pcn_steps"] = c.pcn_steps;
  j["pcn_burn_in"] = c.pcn_burn_in;
  j["pcn_adapt"] = c.pcn_adapt;
  j["quad_grid"] = c.quad_grid;
  j["quad_levels"] = c.quad_levels;
  j["quad_zoom"] = c.quad_zoom;
  j["quadrature"] = c.quadrature;
  j["experiments"] = c.experiments;
  j["decomposition_schedule"] = c.decomposition_schedule;
  j["decomposition_replicates"] = c.decomposition_replicates;
  j["net_spacing"] = c.net_spacing;
  j["max_solves"] = c.max_solves;
  return j;
}

std::string defaults_json() { return to_json(RunConfig{}).dump(2) + "\n"; }

} // namespace passive
