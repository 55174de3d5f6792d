#pragma once

#include "passive/observe.hpp"
#include "passive/pcn.hpp"
#include "passive/prior.hpp"
#include "passive/quadrature.hpp"
#include "passive/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace passive {

/// Flat run configuration shared by every subcommand. Every key has a
/// default except `kappa` and `T`, which must be given explicitly.
struct RunConfig {
  SolverConfig solver;
  double distance_spacing = 1.0 / 64;  ///< checkpoint spacing for space-time distances, fraction of T
  SobolevScale sobolev;

  std::string family = "shear";
  int K_param = 1;
  PriorKind prior_kind = PriorKind::uniform_ball;
  double prior_radius = 1.0;
  std::vector<double> prior_center;
  double prior_tau0 = 1.0;
  double prior_alpha = 4.5;

  std::string ic_pair = "canonical";
  /// Custom initial conditions as [k1, k2, re, im] rows; override ic_pair when set.
  std::vector<std::array<double, 4>> ic_first, ic_second;
  DataLayout layout = DataLayout::same_point;
  bool allow_degenerate = false;

  std::string velocity = "v_star";  ///< solve: heat | radial-symmetry | v_star | path to a field CSV
  std::vector<double> v_star = {0.3, -0.2};

  double sigma_eta = 0.05;
  std::size_t N = 100;  ///< design points for `observe`
  std::vector<std::size_t> N_schedule = {100, 1000, 10000};
  std::size_t replicates = 5;
  std::uint64_t design_seed = 1;
  std::uint64_t noise_seed = 2;
  std::uint64_t chain_seed = 3;
  std::vector<double> eps_list = {0.1};
  std::vector<double> delta_list = {0.05, 0.1, 0.2};

  double pcn_beta = 0.3;
  std::size_t pcn_steps = 20000;
  std::size_t pcn_burn_in = 2000;
  bool pcn_adapt = true;

  int quad_grid = 21;
  int quad_levels = 6;
  bool quad_zoom = true;
  std::string quadrature = "auto";  ///< auto | on | off

  std::vector<std::string> experiments = {"contraction", "identification", "decomposition", "ulln",
                                          "illposedness", "injectivity", "negative-control"};
  std::vector<std::size_t> decomposition_schedule = {100, 1000, 10000, 40000};
  std::size_t decomposition_replicates = 10;
  double net_spacing = 0.1;
  double max_solves = 1e5;

  int threads = 1;  ///< not part of the file; set from --threads

  /// Re-validates every numeric constraint; throws ConfigError naming the key.
  void validate() const;

  PriorSpec prior() const;
  ICPair ics() const;
  ParameterFamily parameter_family() const;
  QuadratureOptions quadrature_options() const;
  PcnOptions pcn_options() const;
  SolverConfig distance_solver() const;
};

/// Strict parse: unknown keys and missing `kappa`/`T` raise ConfigError.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::ordered_json to_json(const RunConfig& c);
/// Every key with its default value.
std::string defaults_json();

} // namespace passive
