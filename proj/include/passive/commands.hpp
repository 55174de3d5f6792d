#pragma once

#include "passive/config.hpp"

#include <iosfwd>
#include <string>

namespace passive {

enum ExitCode { exit_ok = 0, exit_config = 2, exit_numeric = 3, exit_budget = 4 };

/// Trajectories and energy reports for both initial conditions.
void cmd_solve(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
/// observations.csv from sample_design + synthesize_data.
void cmd_observe(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
/// chain_trace.csv and, when the family has at most 4 coordinates, quadrature.json.
void cmd_posterior(const RunConfig& cfg, const std::string& obs_file, const std::string& out_dir, std::ostream& log);
/// One <id>.json record and <id>.csv table per configured experiment.
void cmd_consistency(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
/// Reruns a record; returns false when summaries differ beyond 1e-12.
bool cmd_replay(const std::string& record_file, const std::string& out_dir, int threads, std::ostream& log);

/// Full command-line entry point; maps errors onto exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace passive
