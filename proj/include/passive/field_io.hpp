#pragma once

#include "passive/fields.hpp"

#include <iosfwd>
#include <string>
#include <variant>

namespace passive {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);
double parse_double(const std::string& text);

// CSV layout:
//   lattice_K=<K>,kind=<scalar|velocity>
//   k1,k2,re,im
//   <one row per lattice site, ModeLattice order>
void write_field(std::ostream& os, const FourierScalarField& f);
void write_field(std::ostream& os, const FourierVelocityField& v);

using AnyField = std::variant<FourierScalarField, FourierVelocityField>;
AnyField read_field(std::istream& is);
FourierScalarField read_scalar_field(std::istream& is);
FourierVelocityField read_velocity_field(std::istream& is);

void save_field(const std::string& path, const FourierScalarField& f);
void save_field(const std::string& path, const FourierVelocityField& v);
FourierScalarField load_scalar_field(const std::string& path);
FourierVelocityField load_velocity_field(const std::string& path);

/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);

} // namespace passive
