#include "smmimo/random.hpp"

#include <cmath>
#include <numbers>

namespace smmimo {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

Philox4x32::Key split_key(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

double to_unit_open(std::uint64_t bits) noexcept {
  // (k + 0.5) / 2^52 for k in [0, 2^52): exactly representable, never 0 or 1.
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

std::complex<double> complex_normal_at(std::uint64_t seed, std::uint64_t stream,
                                       std::uint32_t a, std::uint32_t b) noexcept {
  const auto block = Philox4x32::generate(
      {a, b, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
      split_key(seed));
  const std::uint64_t w0 = (static_cast<std::uint64_t>(block[0]) << 32) | block[1];
  const std::uint64_t w1 = (static_cast<std::uint64_t>(block[2]) << 32) | block[3];
  // Box-Muller with radius^2 ~ Exp(1): each quadrature component has variance 1/2.
  const double radius = std::sqrt(-std::log(to_unit_open(w0)));
  const double angle = 2.0 * std::numbers::pi * to_unit_open(w1);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(split_key(seed)), stream_(stream) {}

std::uint64_t CounterRng::next_u64() noexcept {
  const auto block = Philox4x32::generate(
      {static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32),
       static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
      key_);
  ++index_;
  return (static_cast<std::uint64_t>(block[0]) << 32) | block[1];
}

double CounterRng::uniform() noexcept { return to_unit_open(next_u64()); }

double CounterRng::uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  // Rejection keeps the result unbiased for bounds that do not divide 2^64.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % bound;
}

double CounterRng::normal() noexcept {
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  return radius * std::cos(2.0 * std::numbers::pi * uniform());
}

}  // namespace smmimo
