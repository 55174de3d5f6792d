#include "passive/lattice.hpp"

#include "passive/errors.hpp"

#include <cstdlib>
#include <string>

namespace passive {

ModeLattice::ModeLattice(int K) : K_(K) {
  if (K < 0)
    throw ConfigError("lattice truncation K must be >= 0, got " + std::to_string(K));
  const std::size_t side = std::size_t(2 * K + 1);
  size_ = side * side - 1;
  modes_.reserve(size_);
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2)
      if (k1 != 0 || k2 != 0)
        modes_.push_back({k1, k2});
}

Mode ModeLattice::mode(std::size_t i) const { return modes_[i]; }

bool ModeLattice::contains(int k1, int k2) const {
  return std::abs(k1) <= K_ && std::abs(k2) <= K_ && (k1 != 0 || k2 != 0);
}

std::size_t ModeLattice::index(int k1, int k2) const {
  const std::size_t flat = std::size_t(k1 + K_) * side() + std::size_t(k2 + K_);
  const std::size_t origin = std::size_t(K_) * side() + std::size_t(K_);
  return flat < origin ? flat : flat - 1;
}

} // namespace passive
