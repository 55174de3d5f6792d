#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace passive {

/// Philox4x32-10 counter-based generator. A (seed, stream) pair selects the
/// key; draws walk the counter. Distinct streams are statistically
/// independent, so design points, noise and chains never share state.
class Philox {
public:
  using result_type = std::uint32_t;

  Philox(std::uint64_t seed, std::uint64_t stream);
  Philox(std::uint64_t seed, std::string_view stream_name);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller); kept in-house so streams are bit-identical
  /// across standard library implementations.
  double normal();

private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// FNV-1a hash used to turn stream names into stream ids.
std::uint64_t stream_id(std::string_view name);

} // namespace passive
