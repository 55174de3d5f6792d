#pragma once

#include "passive/config.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace passive {

/// Persisted outcome of one experiment. Everything except `timestamp` is a
/// pure function of the stored config and seeds.
struct ExperimentRecord {
  std::string id;
  std::uint64_t design_seed = 0;
  std::uint64_t noise_seed = 0;
  std::vector<std::uint64_t> chain_seeds;
  nlohmann::ordered_json config;
  std::vector<std::size_t> schedule;
  nlohmann::ordered_json summaries = nlohmann::ordered_json::array();
  std::vector<std::string> warnings;
  std::string started;            ///< timestamp.started
  double wall_clock_seconds = 0;  ///< timestamp.wall_clock_seconds
  std::size_t solves = 0;

  std::string to_json() const;
  static ExperimentRecord from_json(const std::string& text);
  /// Plot-ready CSV with one row per summary entry (scalar fields only).
  std::string summary_csv() const;
};

/// Membership in X_delta: paired space-time L2 distance to v_star's
/// trajectories below delta.
class XDeltaProbe {
public:
  XDeltaProbe(const FourierVelocityField& v_star, ICPair ics, SolverConfig config);
  double distance(const FourierVelocityField& v) const;
  bool contains(const FourierVelocityField& v, double delta) const { return distance(v) < delta; }

private:
  ICPair ics_;
  SolverConfig config_;
  TrajectoryPair reference_;
};

struct InjectivityReport {
  std::size_t pairs_checked = 0;
  double min_distance = 0.0;
  std::size_t min_i = 0, min_j = 0;
  double max_quadrature_error = 0.0;  ///< max over pairs of |D_h - D_2h| / 3
  double margin = 0.0;                ///< min_distance / max_quadrature_error
  bool pass = false;                  ///< min_distance > 0 and margin >= 10
};

/// Pairwise paired distances over `v_grid` for pairs at least `tol` apart in H.
InjectivityReport injectivity_probe(const std::vector<FourierVelocityField>& v_grid, const ICPair& ics,
                                    const SolverConfig& config, double tol, SobolevIndex s,
                                    bool allow_degenerate = false);

/// Least-squares slope of log(y) against log(x), negated.
double decay_exponent(const std::vector<double>& x, const std::vector<double>& y);
double median(std::vector<double> x);

ExperimentRecord contraction_experiment(const RunConfig& cfg);
ExperimentRecord identification_experiment(const RunConfig& cfg);
ExperimentRecord decomposition_experiment(const RunConfig& cfg);
ExperimentRecord ulln_experiment(const RunConfig& cfg);
ExperimentRecord illposedness_demo(const RunConfig& cfg);
ExperimentRecord injectivity_experiment(const RunConfig& cfg);
/// Contraction with v_star pushed outside the prior support.
ExperimentRecord negative_control_experiment(const RunConfig& cfg);

/// Contraction and identification share quadrature posteriors for equal
/// configurations within a process; this drops the shared results.
void clear_experiment_cache();

/// Dispatch by experiment id.
ExperimentRecord run_experiment(const std::string& id, const RunConfig& cfg);
/// Reruns an experiment from its record.
ExperimentRecord replay(const ExperimentRecord& record, int threads = 1);
/// Compares summaries; numbers must agree to `tol` relative to max(1, |x|).
bool summaries_match(const ExperimentRecord& a, const ExperimentRecord& b, double tol, std::string* why = nullptr);

} // namespace passive
