#pragma once

#include "passive/fields.hpp"

#include <memory>
#include <span>
#include <vector>

namespace passive {

/// FFT-backed map between lattice coefficients (ModeLattice order) and real
/// values on an n x n grid. Instances own their plans and buffers and are not
/// shareable across threads; create one per worker.
class GridTransform {
public:
  GridTransform(int K, int n);
  ~GridTransform();
  GridTransform(const GridTransform&) = delete;
  GridTransform& operator=(const GridTransform&) = delete;

  int K() const { return K_; }
  int n() const { return n_; }

  /// Synthesizes sum_k c_k e^{2 pi i k.x} on the grid; grid.size() == n*n.
  void to_grid(std::span<const Complex> coeffs, std::span<double> grid);
  /// Projects grid values onto the lattice modes (dropping the mean and
  /// everything beyond K).
  void from_grid(std::span<const double> grid, std::span<Complex> coeffs);

private:
  struct Plans;
  int K_;
  int n_;
  std::size_t half_;
  std::vector<std::size_t> slot_;  // lattice index -> half-spectrum slot, or npos
  std::unique_ptr<Plans> plans_;
};

} // namespace passive
