#include "passive/config.hpp"
#include "passive/errors.hpp"
#include "passive/family.hpp"
#include "passive/lab.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace passive;

namespace {

RunConfig small_config() {
  auto j = nlohmann::json::parse(R"({
    "kappa": 0.05, "T": 1.0, "K": 4,
    "N_schedule": [20, 80], "replicates": 2,
    "quad_grid": 17, "quad_levels": 2,
    "delta_list": [0.02, 0.05, 0.2],
    "decomposition_schedule": [40, 160, 640], "decomposition_replicates": 2
  })");
  return parse_run_config(j);
}

} // namespace

TEST_CASE("decay exponent and median") {
  std::vector<double> x = {100, 1000, 10000}, y;
  for (double n : x)
    y.push_back(3.0 / std::sqrt(n));
  CHECK(decay_exponent(x, y) == doctest::Approx(0.5));
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("X_delta probe") {
  const auto fam = family_preset("shear");
  const auto v_star = fam.velocity(std::vector<double>{0.3, -0.2});
  SolverConfig c;
  c.K = 4;
  XDeltaProbe probe(v_star, canonical_ic_pair(), c);
  CHECK(probe.distance(v_star) == 0.0);
  const auto near = fam.velocity(std::vector<double>{0.31, -0.2});
  const auto far = fam.velocity(std::vector<double>{0.6, 0.2});
  CHECK(probe.distance(near) > 0.0);
  CHECK(probe.distance(near) < probe.distance(far));
  CHECK(probe.contains(near, 2 * probe.distance(near)));
  CHECK_FALSE(probe.contains(near, probe.distance(near)));
}

TEST_CASE("injectivity probe separates spanning pairs and flags identical ones") {
  SolverConfig c;
  c.K = 4;
  const auto fam = family_preset("shear");
  std::vector<FourierVelocityField> grid;
  for (double a : {-0.3, 0.0, 0.3})
    for (double b : {-0.3, 0.0, 0.3})
      grid.push_back(fam.velocity(std::vector<double>{a, b}));
  const auto ok = injectivity_probe(grid, canonical_ic_pair(), c, 1e-12, {2.0});
  CHECK(ok.pairs_checked == 36);
  CHECK(ok.pass);
  CHECK(ok.min_distance > 0.0);

  const auto lam = family_preset("laminar2");
  std::vector<FourierVelocityField> lgrid;
  for (double a : {-0.3, 0.3})
    for (double b : {-0.3, 0.3})
      lgrid.push_back(lam.velocity(std::vector<double>{a, b}));
  CHECK_THROWS_AS(injectivity_probe(lgrid, ic_pair_preset("identical"), c, 1e-12, {2.0}), ConfigError);
  const auto bad = injectivity_probe(lgrid, ic_pair_preset("identical"), c, 1e-12, {2.0}, true);
  CHECK_FALSE(bad.pass);
  CHECK(bad.min_distance <= 1e-10);
}

TEST_CASE("contraction record round trip and replay") {
  clear_experiment_cache();
  const auto cfg = small_config();
  const auto rec = contraction_experiment(cfg);
  CHECK(rec.summaries.size() == cfg.eps_list.size() * cfg.N_schedule.size());
  CHECK(rec.warnings.empty());
  CHECK(rec.solves > 0);
  const auto csv = rec.summary_csv();
  CHECK(csv.rfind("eps,N,mass_median,mean_distance_median,max_discarded_mass\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2);

  const auto back = ExperimentRecord::from_json(rec.to_json());
  CHECK(back.to_json() == rec.to_json());
  const auto j = nlohmann::json::parse(rec.to_json());
  for (const char* key : {"id", "seeds", "config", "schedule", "summaries", "timestamp"})
    CHECK(j.contains(key));

  const auto again = replay(back);
  std::string why;
  CHECK_MESSAGE(summaries_match(rec, again, 1e-12, &why), why);

  auto tampered = again;
  tampered.summaries[0]["mass_median"] = tampered.summaries[0]["mass_median"].get<double>() + 1e-6;
  CHECK_FALSE(summaries_match(rec, tampered, 1e-12));
}

TEST_CASE("identification masses nest in delta") {
  clear_experiment_cache();
  const auto cfg = small_config();
  const auto rec = identification_experiment(cfg);
  std::map<std::size_t, std::vector<double>> by_n;  // delta_list is increasing
  for (const auto& s : rec.summaries)
    if (s["kind"] == "x_delta")
      by_n[s["N"].get<std::size_t>()].push_back(s["mass_median"].get<double>());
  CHECK(by_n.size() == 3);
  for (const auto& [n, masses] : by_n)
    for (std::size_t i = 1; i < masses.size(); ++i)
      CHECK(masses[i - 1] <= masses[i]);
  bool saw_star = false;
  for (const auto& s : rec.summaries)
    if (s["kind"] == "delta_star") {
      saw_star = true;
      CHECK(s["delta_star"].get<double>() > 0.0);
    }
  CHECK(saw_star);
}

TEST_CASE("noise-free decomposition and ULLN vanish at v_star") {
  auto cfg = small_config();
  cfg.sigma_eta = 0.0;
  cfg.net_spacing = 1e-9;
  const auto dec = decomposition_experiment(cfg);
  for (const auto& s : dec.summaries)
    if (s["kind"] == "residual")
      CHECK(s["sup_median"].get<double>() <= 1e-12);
  const auto ulln = ulln_experiment(cfg);
  for (const auto& s : ulln.summaries)
    CHECK(s["sup_median"].get<double>() == 0.0);
}

TEST_CASE("ULLN average shrinks with N") {
  auto cfg = small_config();
  cfg.decomposition_schedule = {50, 5000};
  cfg.decomposition_replicates = 3;
  const auto rec = ulln_experiment(cfg);
  CHECK(rec.summaries[1]["sup_median"].get<double>() < rec.summaries[0]["sup_median"].get<double>());
}

TEST_CASE("ill-posedness and negative control") {
  clear_experiment_cache();
  auto cfg = small_config();
  cfg.N_schedule = {400};
  const auto ill = illposedness_demo(cfg);
  for (const auto& s : ill.summaries) {
    if (s["kind"] == "radial_trajectory_gap" || s["kind"] == "laminar_trajectory_gap")
      CHECK(s["value"].get<double>() <= 1e-8);
    if (s["kind"] == "single_ic")
      CHECK(s["tv_to_prior"].get<double>() <= 0.02);
    if (s["kind"] == "two_ic")
      CHECK(s["tv_to_prior"].get<double>() > 0.5);
  }

  const auto neg = negative_control_experiment(small_config());
  CHECK(neg.warnings.size() == 1);
  CHECK(neg.config["replicates"] == 1);
}

TEST_CASE("budget guard") {
  auto cfg = small_config();
  cfg.max_solves = 10;
  try {
    contraction_experiment(cfg);
    FAIL("expected a budget refusal");
  } catch (const BudgetError& e) {
    CHECK(std::string(e.what()).find("estimated") != std::string::npos);
  }
  CHECK_THROWS_AS(run_experiment("nope", small_config()), ConfigError);
}
