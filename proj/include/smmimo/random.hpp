#ifndef SMMIMO_RANDOM_HPP
#define SMMIMO_RANDOM_HPP

#include <array>
#include <complex>
#include <cstdint>

namespace smmimo {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A block of four 32-bit words is a pure function of (counter, key), so any
/// element of a random stream can be produced independently of every other
/// one. Parallel Monte Carlo trials use this to stay bit-identical for any
/// thread count or evaluation order.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key) noexcept;
};

/// Maps 64 random bits onto the open interval (0, 1) with 52-bit resolution.
double to_unit_open(std::uint64_t bits) noexcept;

/// Circularly-symmetric complex Gaussian sample with E|z|^2 = 1, addressed by
/// (seed, stream, a, b). The same address always gives the same value.
std::complex<double> complex_normal_at(std::uint64_t seed, std::uint64_t stream,
                                       std::uint32_t a, std::uint32_t b) noexcept;

/// Sequential uniform stream on top of Philox for scenario layout and test
/// generators. Each draw consumes one counter value; the whole stream is a
/// function of (seed, stream id).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;                       ///< (0, 1)
  double uniform(double lo, double hi) noexcept;   ///< (lo, hi)
  std::uint64_t below(std::uint64_t bound) noexcept;  ///< [0, bound), bound > 0
  double normal() noexcept;

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
};

}  // namespace smmimo

#endif  // SMMIMO_RANDOM_HPP
