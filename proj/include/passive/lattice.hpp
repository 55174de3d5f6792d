#pragma once

#include <cstddef>
#include <vector>

namespace passive {

struct Mode {
  int k1 = 0;
  int k2 = 0;

  double norm_sq() const { return double(k1) * k1 + double(k2) * k2; }
  bool operator==(const Mode&) const = default;
};

/// Truncated lattice of wave vectors 0 < max(|k1|,|k2|) <= K.
///
/// Sites are enumerated row-major with k1 outer and k2 inner, both running
/// from -K to K, skipping the origin. The enumeration is point-symmetric, so
/// the partner -k of site i sits at size()-1-i.
class ModeLattice {
public:
  explicit ModeLattice(int K = 0);

  int K() const { return K_; }
  std::size_t size() const { return size_; }
  std::size_t side() const { return std::size_t(2 * K_ + 1); }

  Mode mode(std::size_t i) const;
  /// Index of (k1,k2); requires contains(k1,k2).
  std::size_t index(int k1, int k2) const;
  bool contains(int k1, int k2) const;
  std::size_t conjugate(std::size_t i) const { return size_ - 1 - i; }

  const std::vector<Mode>& modes() const { return modes_; }

  bool operator==(const ModeLattice& o) const { return K_ == o.K_; }

private:
  int K_;
  std::size_t size_;
  std::vector<Mode> modes_;
};

} // namespace passive
