#include "passive/commands.hpp"

#include "passive/errors.hpp"
#include "passive/field_io.hpp"
#include "passive/lab.hpp"
#include "passive/observation_io.hpp"
#include "passive/trajectory_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace passive {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

FourierVelocityField velocity_from(const RunConfig& cfg) {
  if (cfg.velocity == "heat")
    return FourierVelocityField(1);
  if (cfg.velocity == "radial-symmetry")
    return radial_symmetric_flow();
  if (cfg.velocity == "v_star")
    return cfg.parameter_family().velocity(cfg.v_star);
  if (!fs::exists(cfg.velocity))
    throw ConfigError("config key 'velocity' is neither a preset nor an existing file: '" + cfg.velocity + "'");
  return load_velocity_field(cfg.velocity);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace

void cmd_solve(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  cfg.validate();
  const auto v = velocity_from(cfg);
  const auto ics = cfg.ics();
  fs::create_directories(out_dir);
  const auto pair = paired_solve(v, ics, cfg.solver);
  int i = 0;
  for (const auto* traj : {&pair.first, &pair.second}) {
    const std::string name = i++ == 0 ? "first" : "second";
    export_trajectory(join(out_dir, name), *traj);
    const auto energy = energy_report(*traj);
    export_energy_report(join(out_dir, "energy_" + name + ".csv"), energy);
    double worst = 0.0;
    for (const auto& e : energy)
      worst = std::max(worst, std::abs(e.residual));
    log << name << ": " << traj->snapshots.size() << " snapshots, max |energy residual| " << worst << "\n";
  }
}

void cmd_observe(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  cfg.validate();
  const auto v_star = cfg.parameter_family().velocity(cfg.v_star);
  // N counts design points; the same-point layout yields two values per point
  const auto design = sample_design(cfg.N, cfg.solver.T, cfg.design_seed);
  ForwardModel model(design, cfg.ics(), cfg.solver, cfg.layout, cfg.allow_degenerate);
  const auto obs = synthesize_data(model, v_star, cfg.sigma_eta, cfg.noise_seed);
  fs::create_directories(out_dir);
  save_observations(join(out_dir, "observations.csv"), obs);
  log << "wrote " << obs.size() << " data values\n";
}

void cmd_posterior(const RunConfig& cfg, const std::string& obs_file, const std::string& out_dir, std::ostream& log) {
  cfg.validate();
  const auto obs = load_observations(obs_file);
  const auto prior = cfg.prior();
  Potential pot(obs, cfg.ics(), cfg.solver, cfg.allow_degenerate);
  fs::create_directories(out_dir);

  Philox rng(cfg.chain_seed, "chain/0");
  const auto chain = pcn_chain(prior, pot, cfg.pcn_options(), rng, prior.center_coords());
  write_file_atomic(join(out_dir, "chain_trace.csv"), chain_trace_csv(chain));
  log << "chain: " << chain.trace.size() << " steps, acceptance " << chain.acceptance_rate() << ", final beta "
      << chain.state.beta << "\n";

  if (cfg.quadrature == "off")
    return;
  if (prior.dim() > 4) {
    const std::string msg = "quadrature refused: the family has " + std::to_string(prior.dim()) +
                            " coordinates and the oracle handles at most 4";
    if (cfg.quadrature == "on")
      throw BudgetError(msg);
    log << msg << "\n";
    return;
  }
  const auto q = quadrature_posterior(prior, pot, cfg.quadrature_options());
  std::vector<BallQuery> balls;
  for (double eps : cfg.eps_list) {
    balls.push_back({"v_star", cfg.v_star, eps, cfg.sobolev.H()});
    balls.push_back({"prior_center", prior.center_coords(), eps, cfg.sobolev.H()});
  }
  write_file_atomic(join(out_dir, "quadrature.json"), quadrature_report_json(q, balls));
  log << "quadrature: " << q.evaluations << " potential evaluations, " << q.levels << " zoom levels\n";
}

void cmd_consistency(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  cfg.validate();
  fs::create_directories(out_dir);
  for (const auto& id : cfg.experiments) {
    const auto rec = run_experiment(id, cfg);
    for (const auto& w : rec.warnings)
      log << "warning (" << id << "): " << w << "\n";
    write_file_atomic(join(out_dir, id + ".json"), rec.to_json());
    write_file_atomic(join(out_dir, id + ".csv"), rec.summary_csv());
    log << id << ": " << rec.summaries.size() << " summaries, " << rec.solves << " solves, "
        << rec.wall_clock_seconds << " s\n";
  }
  clear_experiment_cache();
}

bool cmd_replay(const std::string& record_file, const std::string& out_dir, int threads, std::ostream& log) {
  const auto original = ExperimentRecord::from_json(read_text(record_file));
  const auto rerun = replay(original, threads);
  fs::create_directories(out_dir);
  write_file_atomic(join(out_dir, original.id + ".replay.json"), rerun.to_json());
  std::string why;
  const bool same = summaries_match(original, rerun, 1e-12, &why);
  log << original.id << ": " << (same ? "summaries reproduced" : "summaries differ: " + why) << "\n";
  return same;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian inference of a background flow from passive scalar observations"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".", obs_file, record_file;
  int threads = 1;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "JSON configuration file");
    if (needs_config)
      opt->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* solve_cmd = app.add_subcommand("solve", "integrate both initial conditions and report energy balance");
  add_common(solve_cmd, true);
  auto* observe_cmd = app.add_subcommand("observe", "sample a design and synthesize noisy data");
  add_common(observe_cmd, true);
  auto* posterior_cmd = app.add_subcommand("posterior", "pCN chain and quadrature posterior for an observation file");
  add_common(posterior_cmd, true);
  posterior_cmd->add_option("--obs", obs_file, "observation CSV")->required();
  auto* consistency_cmd = app.add_subcommand("consistency", "run consistency experiments");
  add_common(consistency_cmd, false);
  consistency_cmd->add_option("--replay", record_file, "rerun an experiment record and compare summaries");
  auto* defaults_cmd = app.add_subcommand("defaults", "print every configuration key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return exit_config;
  }

  try {
    if (defaults_cmd->parsed()) {
      out << defaults_json();
      return exit_ok;
    }
    if (consistency_cmd->parsed() && !record_file.empty())
      return cmd_replay(record_file, out_dir, threads, out) ? exit_ok : exit_numeric;
    if (config_path.empty())
      throw ConfigError("--config is required");
    RunConfig cfg = load_run_config(config_path);
    cfg.threads = threads;
    if (solve_cmd->parsed())
      cmd_solve(cfg, out_dir, out);
    else if (observe_cmd->parsed())
      cmd_observe(cfg, out_dir, out);
    else if (posterior_cmd->parsed())
      cmd_posterior(cfg, obs_file, out_dir, out);
    else if (consistency_cmd->parsed())
      cmd_consistency(cfg, out_dir, out);
    return exit_ok;
  } catch (const BudgetError& e) {
    err << "budget: " << e.what() << "\n";
    return exit_budget;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return exit_numeric;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const LatticeMismatch& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_numeric;
  }
}

} // namespace passive
