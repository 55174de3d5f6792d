#include "passive/rng.hpp"

#include <cmath>
#include <numbers>

namespace passive {

namespace {

constexpr std::uint32_t mul0 = 0xD2511F53u;
constexpr std::uint32_t mul1 = 0xCD9E8D57u;
constexpr std::uint32_t weyl0 = 0x9E3779B9u;
constexpr std::uint32_t weyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = std::uint64_t(a) * b;
  hi = std::uint32_t(p >> 32);
  lo = std::uint32_t(p);
}

} // namespace

std::uint64_t stream_id(std::string_view name) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Philox::Philox(std::uint64_t seed, std::uint64_t stream) {
  key_ = {std::uint32_t(seed), std::uint32_t(seed >> 32)};
  counter_[2] = std::uint32_t(stream);
  counter_[3] = std::uint32_t(stream >> 32);
}

Philox::Philox(std::uint64_t seed, std::string_view stream_name) : Philox(seed, stream_id(stream_name)) {}

void Philox::refill() {
  std::array<std::uint32_t, 4> x = counter_;
  std::array<std::uint32_t, 2> k = key_;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(mul0, x[0], hi0, lo0);
    mulhilo(mul1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
    k[0] += weyl0;
    k[1] += weyl1;
  }
  block_ = x;
  used_ = 0;
  if (++counter_[0] == 0)
    ++counter_[1];
}

Philox::result_type Philox::operator()() {
  if (used_ == 4)
    refill();
  return block_[std::size_t(used_++)];
}

double Philox::uniform() {
  const std::uint64_t hi = (*this)() >> 5;  // 27 bits
  const std::uint64_t lo = (*this)() >> 6;  // 26 bits
  return double((hi << 26) | lo) * 0x1.0p-53;
}

double Philox::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0)
    u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

} // namespace passive
