#include "passive/trajectory_io.hpp"

#include "passive/errors.hpp"
#include "passive/field_io.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace passive {

namespace fs = std::filesystem;

namespace {
std::string snapshot_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%05zu.csv", i);
  return buf;
}
} // namespace

void export_trajectory(const std::string& dir, const ScalarTrajectory& traj) {
  fs::create_directories(dir);
  nlohmann::ordered_json manifest;
  manifest["ic_id"] = traj.ic_id;
  manifest["kappa"] = traj.config.kappa;
  manifest["T"] = traj.config.T;
  manifest["dt_max"] = traj.config.dt_max;
  manifest["dt"] = traj.dt_used;
  manifest["K"] = traj.config.K;
  manifest["grid_n"] = traj.grid_used;
  manifest["h_chk"] = traj.h_chk;
  auto& snaps = manifest["snapshots"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const std::string name = snapshot_name(i);
    save_field((fs::path(dir) / name).string(), traj.snapshots[i].theta);
    // times go through the shortest round-trip text, not JSON's default
    snaps.push_back({{"t", format_double(traj.snapshots[i].t)}, {"file", name}});
  }
  write_file_atomic((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

ScalarTrajectory import_trajectory(const std::string& dir) {
  std::ifstream is(fs::path(dir) / "manifest.json");
  if (!is)
    throw FormatError("missing manifest.json in " + dir);
  const auto manifest = nlohmann::json::parse(is);
  ScalarTrajectory traj;
  traj.ic_id = manifest.at("ic_id").get<std::string>();
  traj.config.kappa = manifest.at("kappa").get<double>();
  traj.config.T = manifest.at("T").get<double>();
  traj.config.dt_max = manifest.at("dt_max").get<double>();
  traj.config.K = manifest.at("K").get<int>();
  traj.dt_used = manifest.at("dt").get<double>();
  traj.grid_used = manifest.at("grid_n").get<int>();
  traj.h_chk = manifest.at("h_chk").get<double>();
  traj.config.checkpoint_spacing = traj.h_chk;
  for (const auto& s : manifest.at("snapshots"))
    traj.snapshots.push_back({parse_double(s.at("t").get<std::string>()),
                              load_scalar_field((fs::path(dir) / s.at("file").get<std::string>()).string())});
  return traj;
}

void export_energy_report(const std::string& path, const std::vector<EnergyRecord>& report) {
  std::ostringstream os;
  os << "t,l2_sq,dissipation_integral,residual\n";
  for (const auto& r : report)
    os << format_double(r.t) << ',' << format_double(r.l2_sq) << ',' << format_double(r.dissipation_integral) << ','
       << format_double(r.residual) << '\n';
  write_file_atomic(path, os.str());
}

} // namespace passive
