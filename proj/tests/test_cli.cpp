#include "passive/commands.hpp"
#include "passive/config.hpp"
#include "passive/errors.hpp"
#include "passive/observation_io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace passive;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("passive-test-" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "passive");
  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const char* base = R"("kappa": 0.05, "T": 1.0, "K": 4, "pcn_steps": 300, "pcn_burn_in": 100, "quad_grid": 17)";

} // namespace

TEST_CASE("config errors exit with code 2 and name the key") {
  TempDir dir("config");
  write(dir / "missing.json", R"({"T": 1.0})");
  auto r = cli({"solve", "--config", dir / "missing.json", "--out", dir / "o"});
  CHECK(r.code == 2);
  CHECK(r.err.find("kappa") != std::string::npos);

  write(dir / "unknown.json", std::string("{") + base + R"(, "kapa": 1})");
  r = cli({"solve", "--config", dir / "unknown.json", "--out", dir / "o"});
  CHECK(r.code == 2);
  CHECK(r.err.find("kapa") != std::string::npos);

  write(dir / "bad.json", std::string("{") + base + R"(, "sigma_eta": -1})");
  r = cli({"observe", "--config", dir / "bad.json", "--out", dir / "o"});
  CHECK(r.code == 2);
  CHECK(r.err.find("sigma_eta") != std::string::npos);

  CHECK(cli({"solve", "--config", dir / "absent.json"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
}

TEST_CASE("defaults round trip through the parser") {
  const auto r = cli({"defaults"});
  CHECK(r.code == 0);
  const auto cfg = parse_run_config(nlohmann::json::parse(r.out));
  CHECK(to_json(cfg).dump() == nlohmann::ordered_json::parse(r.out).dump());
}

TEST_CASE("solve writes trajectories and energy reports") {
  TempDir dir("solve");
  write(dir / "heat.json", std::string("{") + base + R"(, "velocity": "heat"})");
  auto r = cli({"solve", "--config", dir / "heat.json", "--out", dir / "heat"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "heat/energy_first.csv"));
  CHECK(fs::exists(dir / "heat/energy_second.csv"));
  CHECK(fs::is_directory(dir / "heat/first"));

  write(dir / "radial.json", std::string("{") + base + R"(, "velocity": "radial-symmetry"})");
  r = cli({"solve", "--config", dir / "radial.json", "--out", dir / "radial"});
  REQUIRE(r.code == 0);
  std::istringstream csv(slurp(dir / "radial/energy_first.csv"));
  std::string line;
  std::getline(csv, line);
  const auto cols = line;
  CHECK(cols.find("residual") != std::string::npos);
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    const double residual = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(std::abs(residual) <= 1e-5 * 0.5);
  }
  CHECK(rows == 65);
}

TEST_CASE("observe is deterministic, interleaved and exact without noise") {
  TempDir dir("observe");
  write(dir / "c.json", std::string("{") + base + R"(, "N": 30})");
  REQUIRE(cli({"observe", "--config", dir / "c.json", "--out", dir / "a"}).code == 0);
  REQUIRE(cli({"observe", "--config", dir / "c.json", "--out", dir / "b"}).code == 0);
  const auto a = slurp(dir / "a/observations.csv");
  CHECK(a == slurp(dir / "b/observations.csv"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 2 + 60);

  write(dir / "exact.json", std::string("{") + base + R"(, "N": 30, "sigma_eta": 0.0})");
  REQUIRE(cli({"observe", "--config", dir / "exact.json", "--out", dir / "e"}).code == 0);
  const auto obs = load_observations(dir / "e/observations.csv");
  CHECK(obs.Y == obs.G_true);
}

TEST_CASE("posterior runs on empty and real data and reruns identically") {
  TempDir dir("posterior");
  write(dir / "c.json", std::string("{") + base + R"(, "N": 20})");
  REQUIRE(cli({"observe", "--config", dir / "c.json", "--out", dir / "d"}).code == 0);
  REQUIRE(cli({"posterior", "--config", dir / "c.json", "--obs", dir / "d/observations.csv", "--out", dir / "p1"})
              .code == 0);
  REQUIRE(cli({"posterior", "--config", dir / "c.json", "--obs", dir / "d/observations.csv", "--out", dir / "p2"})
              .code == 0);
  CHECK(slurp(dir / "p1/chain_trace.csv") == slurp(dir / "p2/chain_trace.csv"));
  CHECK(slurp(dir / "p1/quadrature.json") == slurp(dir / "p2/quadrature.json"));
  const auto q = nlohmann::json::parse(slurp(dir / "p1/quadrature.json"));
  CHECK(q.contains("ball_masses"));

  write(dir / "empty.csv", "# sigma_eta=0.05,design_seed=1,noise_seed=2,T=1,layout=same_point\nj,t,x1,x2,ic,G_true,Y\n");
  const auto r = cli({"posterior", "--config", dir / "c.json", "--obs", dir / "empty.csv", "--out", dir / "p3"});
  CHECK(r.code == 0);
  const auto trace = slurp(dir / "p3/chain_trace.csv");
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 1 + 400);

  write(dir / "modes.json", std::string("{") + base + R"(, "family": "modes", "v_star": [0,0,0,0,0,0,0,0], "quadrature": "on"})");
  CHECK(cli({"posterior", "--config", dir / "modes.json", "--obs", dir / "empty.csv", "--out", dir / "p4"}).code == 4);
}

TEST_CASE("consistency writes records that replay") {
  TempDir dir("consistency");
  write(dir / "c.json", std::string("{") + base +
                            R"(, "N_schedule": [20, 40], "replicates": 1, "quad_levels": 1, "experiments": ["contraction"]})");
  auto r = cli({"consistency", "--config", dir / "c.json", "--out", dir / "run"});
  REQUIRE(r.code == 0);
  const auto csv = slurp(dir / "run/contraction.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2);
  r = cli({"consistency", "--replay", dir / "run/contraction.json", "--out", dir / "replay"});
  CHECK(r.code == 0);
  CHECK(r.out.find("reproduced") != std::string::npos);

  write(dir / "budget.json", std::string("{") + base + R"(, "max_solves": 5, "experiments": ["contraction"]})");
  r = cli({"consistency", "--config", dir / "budget.json", "--out", dir / "b"});
  CHECK(r.code == 4);
  CHECK(r.err.find("estimated") != std::string::npos);
}
