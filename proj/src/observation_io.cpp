#include "passive/observation_io.hpp"

#include "passive/errors.hpp"
#include "passive/field_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace passive {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep))
    out.push_back(cur);
  return out;
}

} // namespace

void write_observations(std::ostream& os, const ObservationSet& obs) {
  os << "# sigma_eta=" << format_double(obs.sigma_eta) << ",design_seed=" << obs.design.seed
     << ",noise_seed=" << obs.noise_seed << ",T=" << format_double(obs.design.T)
     << ",layout=" << (obs.layout == DataLayout::same_point ? "same_point" : "alternate") << '\n';
  os << "j,t,x1,x2,ic,G_true,Y\n";
  for (std::size_t j = 0; j < obs.size(); ++j) {
    const auto& p = obs.design.points[obs.point_of(j)];
    os << j + 1 << ',' << format_double(p.t) << ',' << format_double(p.x.x1) << ',' << format_double(p.x.x2) << ','
       << obs.ic_of(j) << ',' << format_double(obs.G_true[j]) << ',' << format_double(obs.Y[j]) << '\n';
  }
}

ObservationSet read_observations(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw FormatError("observation file: missing '# ' header");
  std::map<std::string, std::string> meta;
  for (const auto& kv : split(line.substr(2), ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw FormatError("observation file: bad header entry '" + kv + "'");
    meta[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  for (const char* key : {"sigma_eta", "design_seed", "noise_seed", "T", "layout"})
    if (!meta.count(key))
      throw FormatError(std::string("observation file: header lacks ") + key);
  ObservationSet obs;
  obs.sigma_eta = parse_double(meta["sigma_eta"]);
  obs.design.seed = std::stoull(meta["design_seed"]);
  obs.noise_seed = std::stoull(meta["noise_seed"]);
  obs.design.T = parse_double(meta["T"]);
  if (meta["layout"] == "same_point")
    obs.layout = DataLayout::same_point;
  else if (meta["layout"] == "alternate")
    obs.layout = DataLayout::alternate;
  else
    throw FormatError("observation file: unknown layout '" + meta["layout"] + "'");
  if (!std::getline(is, line) || line != "j,t,x1,x2,ic,G_true,Y")
    throw FormatError("observation file: missing column header");
  std::size_t expected = 1;
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    const auto c = split(line, ',');
    if (c.size() != 7)
      throw FormatError("observation file: expected 7 columns in '" + line + "'");
    if (std::stoull(c[0]) != expected)
      throw FormatError("observation file: rows out of order at j=" + c[0]);
    const std::size_t j = expected - 1;
    const SpaceTimePoint p{parse_double(c[1]), {parse_double(c[2]), parse_double(c[3])}};
    if (obs.point_of(j) == obs.design.points.size())
      obs.design.points.push_back(p);
    if (std::stoi(c[4]) != obs.ic_of(j))
      throw FormatError("observation file: ic column does not follow the interleaving at j=" + c[0]);
    obs.G_true.push_back(parse_double(c[5]));
    obs.Y.push_back(parse_double(c[6]));
    ++expected;
  }
  return obs;
}

void save_observations(const std::string& path, const ObservationSet& obs) {
  std::ostringstream os;
  write_observations(os, obs);
  write_file_atomic(path, os.str());
}

ObservationSet load_observations(const std::string& path) {
  std::ifstream is(path);
  if (!is)
    throw FormatError("cannot open " + path);
  return read_observations(is);
}

} // namespace passive
