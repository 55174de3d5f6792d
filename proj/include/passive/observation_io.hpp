#pragma once

#include "passive/observe.hpp"

#include <iosfwd>
#include <string>

namespace passive {

// CSV layout:
//   # sigma_eta=<s>,design_seed=<d>,noise_seed=<n>,T=<T>,layout=<same_point|alternate>
//   j,t,x1,x2,ic,G_true,Y
// with j 1-based; every float uses the shortest exact decimal form.
void write_observations(std::ostream& os, const ObservationSet& obs);
ObservationSet read_observations(std::istream& is);

void save_observations(const std::string& path, const ObservationSet& obs);
ObservationSet load_observations(const std::string& path);

} // namespace passive
