#include "passive/field_io.hpp"

#include "passive/errors.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>
#include <vector>

namespace passive {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double x = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  while (first < last && (*first == ' ' || *first == '+'))
    ++first;
  auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc{} || res.ptr != last)
    throw FormatError("not a number: '" + text + "'");
  return x;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep))
    out.push_back(cur);
  if (!line.empty() && line.back() == sep)
    out.emplace_back();
  return out;
}

void write_rows(std::ostream& os, const ModeLattice& lattice, std::span<const Complex> c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Mode k = lattice.mode(i);
    os << k.k1 << ',' << k.k2 << ',' << format_double(c[i].real()) << ',' << format_double(c[i].imag()) << '\n';
  }
}

} // namespace

void write_field(std::ostream& os, const FourierScalarField& f) {
  os << "lattice_K=" << f.K() << ",kind=scalar\n" << "k1,k2,re,im\n";
  write_rows(os, f.lattice(), f.coeffs());
}

void write_field(std::ostream& os, const FourierVelocityField& v) {
  os << "lattice_K=" << v.K() << ",kind=velocity\n" << "k1,k2,re,im\n";
  write_rows(os, v.lattice(), v.amps());
}

AnyField read_field(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw FormatError("field file: missing header");
  const auto head = split(line);
  if (head.size() != 2 || head[0].rfind("lattice_K=", 0) != 0 || head[1].rfind("kind=", 0) != 0)
    throw FormatError("field file: bad header '" + line + "'");
  const int K = std::stoi(head[0].substr(10));
  const std::string kind = head[1].substr(5);
  if (kind != "scalar" && kind != "velocity")
    throw FormatError("field file: unknown kind '" + kind + "'");
  const ModeLattice lattice(K);
  std::vector<Complex> c(lattice.size());
  std::vector<bool> seen(lattice.size(), false);
  while (std::getline(is, line)) {
    if (line.empty() || line == "k1,k2,re,im")
      continue;
    const auto cols = split(line);
    if (cols.size() != 4)
      throw FormatError("field file: expected 4 columns in '" + line + "'");
    const int k1 = std::stoi(cols[0]);
    const int k2 = std::stoi(cols[1]);
    if (!lattice.contains(k1, k2))
      throw FormatError("field file: mode outside lattice in '" + line + "'");
    const std::size_t i = lattice.index(k1, k2);
    c[i] = Complex(parse_double(cols[2]), parse_double(cols[3]));
    seen[i] = true;
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!seen[i])
      throw FormatError("field file: missing mode row");
    const Complex partner = c[lattice.conjugate(i)];
    const bool ok = kind == "scalar" ? std::conj(c[i]) == partner : std::conj(c[i]) == -partner;
    if (!ok)
      throw FormatError("field file: coefficients violate the reality constraint");
  }
  if (kind == "scalar")
    return FourierScalarField(lattice, std::move(c));
  return FourierVelocityField(lattice, std::move(c));
}

FourierScalarField read_scalar_field(std::istream& is) {
  auto f = read_field(is);
  if (!std::holds_alternative<FourierScalarField>(f))
    throw FormatError("expected a scalar field");
  return std::get<FourierScalarField>(std::move(f));
}

FourierVelocityField read_velocity_field(std::istream& is) {
  auto f = read_field(is);
  if (!std::holds_alternative<FourierVelocityField>(f))
    throw FormatError("expected a velocity field");
  return std::get<FourierVelocityField>(std::move(f));
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os)
      throw FormatError("cannot open " + tmp + " for writing");
    os << contents;
    if (!os)
      throw FormatError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void save_field(const std::string& path, const FourierScalarField& f) {
  std::ostringstream os;
  write_field(os, f);
  write_file_atomic(path, os.str());
}

void save_field(const std::string& path, const FourierVelocityField& v) {
  std::ostringstream os;
  write_field(os, v);
  write_file_atomic(path, os.str());
}

FourierScalarField load_scalar_field(const std::string& path) {
  std::ifstream is(path);
  if (!is)
    throw FormatError("cannot open " + path);
  return read_scalar_field(is);
}

FourierVelocityField load_velocity_field(const std::string& path) {
  std::ifstream is(path);
  if (!is)
    throw FormatError("cannot open " + path);
  return read_velocity_field(is);
}

} // namespace passive
