#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fdbf/numerics.hpp"

namespace fdbf {

/// Identifies one independent random stream. Monte Carlo trial t uses
/// stream id t under the run seed.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RngState&, const RngState&) = default;
};

/// Philox4x32-10 counter-based generator. The 128-bit counter is
/// (block index, stream id) and the key is the seed, so every (seed, stream)
/// pair owns a disjoint sequence and positions can be reproduced exactly.
class PhiloxEngine {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit PhiloxEngine(RngState state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// The raw bijection. Exposed for known-answer tests.
  static Block philox(Block ctr, Key key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }

  /// Next 128 random bits; advances the block counter by one.
  Block next_block() {
    const Block ctr{static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                    static_cast<std::uint32_t>(state_.stream), static_cast<std::uint32_t>(state_.stream >> 32)};
    const Key key{static_cast<std::uint32_t>(state_.seed), static_cast<std::uint32_t>(state_.seed >> 32)};
    ++counter_;
    has_spare_ = false;
    return philox(ctr, key);
  }

  result_type operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const Block b = next_block();
    spare_ = join(b[2], b[3]);
    has_spare_ = true;
    return join(b[0], b[1]);
  }

  const RngState& state() const { return state_; }
  std::uint64_t blocks_consumed() const { return counter_; }

  static std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
    return std::uint64_t{lo} | (std::uint64_t{hi} << 32);
  }

 private:
  RngState state_;
  std::uint64_t counter_ = 0;
  std::uint64_t spare_ = 0;
  bool has_spare_ = false;
};

/// One CN(0, 1) draw from exactly one Philox block (Box-Muller).
template <typename Scalar = double>
std::complex<Scalar> standard_complex_normal(PhiloxEngine& rng) {
  const auto b = rng.next_block();
  constexpr double kTwoPow53 = 9007199254740992.0;
  // u1 in (0, 1] so the log is finite; u2 in [0, 1).
  const double u1 = static_cast<double>((PhiloxEngine::join(b[0], b[1]) >> 11) + 1) / kTwoPow53;
  const double u2 = static_cast<double>(PhiloxEngine::join(b[2], b[3]) >> 11) / kTwoPow53;
  // Each quadrature has variance 1/2.
  const double r = std::sqrt(-std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {static_cast<Scalar>(r * std::cos(theta)), static_cast<Scalar>(r * std::sin(theta))};
}

/// n i.i.d. circularly-symmetric CN(mean, std^2) samples drawn from rng.
template <typename Scalar = double>
CVector<Scalar> sample_complex_gaussian(PhiloxEngine& rng, Eigen::Index n, std::complex<Scalar> mean,
                                        Scalar std) {
  if (n < 1) throw std::invalid_argument("sample_complex_gaussian: n must be >= 1");
  if (!(std >= Scalar(0))) throw std::invalid_argument("sample_complex_gaussian: std must be >= 0");
  CVector<Scalar> out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = mean + std * standard_complex_normal<Scalar>(rng);
  return out;
}

template <typename Scalar = double>
CVector<Scalar> sample_complex_gaussian(RngState state, Eigen::Index n, std::complex<Scalar> mean, Scalar std) {
  PhiloxEngine rng(state);
  return sample_complex_gaussian<Scalar>(rng, n, mean, std);
}

}  // namespace fdbf
