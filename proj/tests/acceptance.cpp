// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
#include "passive/commands.hpp"
#include "passive/config.hpp"
#include "passive/errors.hpp"
#include "passive/family.hpp"
#include "passive/lab.hpp"
#include "passive/observation_io.hpp"
#include "passive/pcn.hpp"
#include "passive/potential.hpp"
#include "passive/quadrature.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace passive;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

#ifndef PASSIVE_FIXTURE_DIR
#define PASSIVE_FIXTURE_DIR "."
#endif

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Clock {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

/// Experiment settings shared by the lab criteria.
RunConfig lab_config() {
  return parse_run_config(nlohmann::json::parse(R"({"kappa": 0.05, "T": 1.0, "K": 4, "quad_grid": 17})"));
}

FourierVelocityField random_velocity(int K, std::uint64_t seed, double scale) {
  Philox rng(seed, "acceptance-velocity");
  FourierVelocityField v(K);
  for (std::size_t i = 0; i < v.lattice().size() / 2; ++i) {
    const Mode k = v.lattice().mode(i);
    const double a = scale / k.norm_sq();
    v.set(k.k1, k.k2, Complex(a * rng.normal(), a * rng.normal()));
  }
  return v;
}

FourierScalarField random_scalar(int K, std::uint64_t seed) {
  Philox rng(seed, "acceptance-scalar");
  FourierScalarField f(K);
  for (std::size_t i = 0; i < f.lattice().size() / 2; ++i) {
    const Mode k = f.lattice().mode(i);
    const double a = std::pow(k.norm_sq(), -1.5);
    f.set(k.k1, k.k2, Complex(a * rng.normal(), a * rng.normal()));
  }
  return f;
}

const ojson* find_kind(const ExperimentRecord& r, const std::string& kind) {
  for (const auto& s : r.summaries)
    if (s.contains("kind") && s["kind"] == kind)
      return &s;
  return nullptr;
}

std::vector<ExperimentRecord> records;  // kept for the reproducibility criterion

Outcome heat_regression() {
  Clock clock;
  SolverConfig c;
  c.K = 8;
  const auto traj = solve(FourierVelocityField(1), sine_x1(), c);
  const double decay = std::exp(-4 * M_PI * M_PI * c.kappa);
  const double err = sup_norm(traj.snapshots.back().theta - decay * sine_x1().embedded(8));
  const double t = clock.seconds();
  return {err <= 1e-8 && t < 1.0, "sup error " + fmt(err) + ", " + fmt(t) + " s"};
}

Outcome energy_identity() {
  auto v = random_velocity(2, 1, 1.0);
  v *= 1.0 / sobolev_norm(v, {3.0});
  const double e0 = std::pow(sobolev_norm(sine_x1(), {0.0}), 2);
  std::vector<double> res;
  for (double dt : {1.0 / 64, 1.0 / 128}) {
    SolverConfig c;
    c.dt_max = dt;
    c.checkpoint_spacing = dt;
    res.push_back(std::abs(energy_report(solve(v, sine_x1(), c)).back().residual) / e0);
  }
  const double ratio = res[0] / res[1];
  return {res[1] <= 1e-5 && ratio >= 4.0,
          "relative residual " + fmt(res[1]) + " at dt=1/128, halving ratio " + fmt(ratio)};
}

Outcome maximum_principle() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto v = random_velocity(2, 100 + seed, 1.0);
    const auto theta0 = random_scalar(3, 200 + seed);
    SolverConfig c;
    c.K = 12;
    worst = std::max(worst, trajectory_sup(solve(v, theta0, c)) / sup_norm(theta0, 256));
  }
  return {worst <= 1 + 1e-6, "max over 20 fixtures of sup|theta(t)| / sup|theta0| = " + fmt(worst)};
}

Outcome illposedness() {
  Clock clock;
  const auto rec = illposedness_demo(lab_config());
  records.push_back(rec);
  const double radial = (*find_kind(rec, "radial_trajectory_gap"))["value"].get<double>();
  const double laminar = (*find_kind(rec, "laminar_trajectory_gap"))["value"].get<double>();
  const double tv = (*find_kind(rec, "single_ic"))["tv_to_prior"].get<double>();
  const double mass = (*find_kind(rec, "two_ic"))["ball_mass"].get<double>();
  const double t = clock.seconds();
  return {radial <= 1e-8 && laminar <= 1e-8 && tv <= 0.02 && mass >= 0.9 && t < 300,
          "radial gap " + fmt(radial) + ", laminar gap " + fmt(laminar) + ", single-IC TV " + fmt(tv) +
              ", two-IC ball mass " + fmt(mass) + ", " + fmt(t) + " s"};
}

Outcome injectivity() {
  Clock clock;
  const auto rec = injectivity_experiment(lab_config());
  records.push_back(rec);
  const auto& ok = *find_kind(rec, "spanning");
  const auto& bad = *find_kind(rec, "failing_control");
  const double t = clock.seconds();
  const double near_zero = bad["min_distance"].get<double>();
  return {ok["pass"].get<bool>() && near_zero <= 1e-10 && t < 600,
          "min distance " + fmt(ok["min_distance"].get<double>()) + ", margin " + fmt(ok["margin"].get<double>()) +
              ", control min distance " + fmt(near_zero) + ", " + fmt(t) + " s"};
}

Outcome decomposition() {
  Clock clock;
  const auto rec = decomposition_experiment(lab_config());
  records.push_back(rec);
  records.push_back(ulln_experiment(lab_config()));
  std::vector<double> meds;
  for (const auto& s : rec.summaries)
    if (s["kind"] == "residual")
      meds.push_back(s["sup_median"].get<double>());
  const double p = (*find_kind(rec, "fit"))["decay_exponent"].get<double>();
  const double t = clock.seconds();
  std::string list;
  for (double m : meds)
    list += (list.empty() ? "" : " ") + fmt(m);
  return {meds.back() < meds.front() && p >= 0.3 && p <= 0.7 && t < 1200,
          "median sup residuals " + list + ", exponent " + fmt(p) + ", " + fmt(t) + " s (with the ULLN run)"};
}

bool compare_pinned(const ExperimentRecord& rec, std::string& note) {
  const fs::path path = fs::path(PASSIVE_FIXTURE_DIR) / "contraction_pinned.json";
  if (!fs::exists(path)) {
    fs::create_directories(path.parent_path());
    std::ofstream(path) << rec.summaries.dump(2) << '\n';
    note = "pinned to " + path.filename().string();
    return true;
  }
  std::ifstream in(path);
  const auto pinned = ojson::parse(in);
  ExperimentRecord ref = rec;
  ref.summaries = pinned;
  std::string why;
  // pinned across builds and machines, so allow last-bit drift in FFT kernels
  const bool same = summaries_match(ref, rec, 1e-6, &why);
  note = same ? "matches pinned fixture" : "differs from pinned fixture: " + why;
  return same;
}

Outcome contraction() {
  Clock clock;
  const auto cfg = lab_config();
  const auto rec = contraction_experiment(cfg);
  records.push_back(rec);
  records.push_back(identification_experiment(cfg));
  const double t = clock.seconds();
  // masses saturate near 1 already at N=100, so equal-to-rounding steps count as monotone
  const double slack = 1e-9;
  bool mono = true, closer = true;
  std::string masses, dists;
  double prev_mass = -1, prev_dist = INFINITY, last_mass = 0;
  for (const auto& s : rec.summaries) {
    const double m = s["mass_median"].get<double>(), d = s["mean_distance_median"].get<double>();
    mono = mono && m >= prev_mass - slack;
    closer = closer && d < prev_dist;
    prev_mass = m;
    prev_dist = d;
    last_mass = m;
    masses += (masses.empty() ? "" : " ") + fmt(1.0 - m);
    dists += (dists.empty() ? "" : " ") + fmt(d);
  }
  std::string note;
  const bool pinned = compare_pinned(rec, note);
  const auto neg = negative_control_experiment(cfg);
  records.push_back(neg);
  return {mono && closer && last_mass >= 0.9 && t < 1800 && pinned && neg.warnings.size() == 1,
          "ball mass deficits 1-m " + masses + ", mean distances " + dists + ", " + note + ", negative control warned: " +
              (neg.warnings.empty() ? "no" : "yes") + ", " + fmt(t) + " s"};
}

Outcome sampler() {
  PriorSpec prior = lab_config().prior();
  PcnOptions o;
  o.beta = 0.3;
  o.n_steps = 100000;
  o.adapt = false;
  Philox rng(7, "chain/0");
  const auto empty =
      pcn_chain(prior, [](std::span<const double>) { return 0.0; }, o, rng, prior.center_coords());
  // uniform on the coordinate disk of radius sqrt(2): mean 0, second moment 1/2 per coordinate
  double worst_mean = 0.0, worst_moment = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    double m = 0.0, s = 0.0;
    for (const auto& st : empty.trace) {
      m += st.coords[k];
      s += st.coords[k] * st.coords[k];
    }
    m /= double(empty.trace.size());
    s /= double(empty.trace.size());
    worst_mean = std::max(worst_mean, std::abs(m) / std::sqrt(0.5));
    worst_moment = std::max(worst_moment, std::abs(s / 0.5 - 1.0));
  }

  const auto cfg = lab_config();
  const auto fam = cfg.parameter_family();
  const auto obs = synthesize_data(fam.velocity(cfg.v_star), sample_design(100, 1.0, 11), cfg.ics(),
                                   cfg.sigma_eta, 12, cfg.solver);
  const Potential pot(obs, cfg.ics(), cfg.solver);
  const auto q = quadrature_posterior(prior, pot, cfg.quadrature_options());
  Philox rng2(13, "chain/0");
  const auto chain = pcn_chain(prior, pot, cfg.pcn_options(), rng2, prior.center_coords());
  const auto m = chain.mean(), se = chain.standard_error(), qm = q.mean();
  double worst_z = 0.0;
  for (std::size_t k = 0; k < 2; ++k)
    worst_z = std::max(worst_z, std::abs(m[k] - qm[k]) / se[k]);
  return {worst_mean <= 0.05 && worst_moment <= 0.05 && worst_z <= 3.0,
          "prior chain: |mean|/sd " + fmt(worst_mean) + ", second-moment error " + fmt(worst_moment) +
              "; data chain vs quadrature: " + fmt(worst_z) + " SE"};
}

Outcome reproducibility() {
  std::string failures;
  for (const auto& rec : records) {
    const auto again = replay(ExperimentRecord::from_json(rec.to_json()));
    std::string why;
    if (!summaries_match(rec, again, 1e-12, &why))
      failures += " " + rec.id + " (" + why + ")";
  }

  const fs::path dir = fs::temp_directory_path() / "passive-acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream(dir / "config.json") << R"({"kappa": 0.05, "T": 1.0, "K": 4, "N": 50, "quad_grid": 17})";
  }
  std::ostringstream log;
  const auto cfg = load_run_config((dir / "config.json").string());
  cmd_observe(cfg, (dir / "data").string(), log);
  const auto obs = (dir / "data" / "observations.csv").string();
  cmd_posterior(cfg, obs, (dir / "a").string(), log);
  cmd_posterior(cfg, obs, (dir / "b").string(), log);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  const bool traces = slurp(dir / "a" / "chain_trace.csv") == slurp(dir / "b" / "chain_trace.csv") &&
                      slurp(dir / "a" / "quadrature.json") == slurp(dir / "b" / "quadrature.json");
  fs::remove_all(dir);
  if (!traces)
    failures += " chain traces differ";
  return {failures.empty(), std::to_string(records.size()) + " experiment records replayed" +
                                (failures.empty() ? ", chain traces byte-identical" : ";" + failures)};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 solver heat regression", heat_regression},
      {"2 energy identity", energy_identity},
      {"3 maximum principle", maximum_principle},
      {"4 ill-posedness", illposedness},
      {"5 injectivity", injectivity},
      {"6 potential decomposition", decomposition},
      {"7 posterior contraction", contraction},
      {"8 sampler correctness", sampler},
      {"9 reproducibility", reproducibility},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << name << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << ")" << std::endl;
  }
  return failed ? 1 : 0;
}
