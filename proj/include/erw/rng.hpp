#pragma once
// Random streams for replicate-parallel Monte Carlo.
//
// Every replicate owns independent engines derived from (master seed,
// replicate index, substream). Results therefore do not depend on how
// replicates are scheduled across workers.

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace erw {

/// xoshiro256** (Blackman and Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  Xoshiro256() : s_{0x9e3779b97f4a7c15ull, 0xbf58476d1ce4e5b9ull,
                    0x94d049bb133111ebull, 0x2545f4914f6cdd1dull} {}
  explicit Xoshiro256(std::seed_seq& seq) {
    std::uint32_t w[8];
    seq.generate(w, w + 8);
    for (int i = 0; i < 4; ++i)
      s_[i] = (static_cast<std::uint64_t>(w[2 * i]) << 32) | w[2 * i + 1];
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  result_type operator()() {
    const std::uint64_t out = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return out;
  }

  friend bool operator==(const Xoshiro256&, const Xoshiro256&) = default;

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

using Engine = Xoshiro256;

/// Substream tags. Directions and step sizes use separate streams so that
/// swapping the step-size law leaves the direction path untouched.
enum class Substream : std::uint32_t {
  directions = 0,
  step_sizes = 1,
  urn = 2,
  gaussian = 3,
  jitter = 4,
  small_ball = 5,
};

inline Engine make_stream(std::uint64_t seed, std::uint64_t replicate,
                          Substream sub) {
  const auto s = static_cast<std::uint32_t>(sub);
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(replicate >> 32), s,
                    0x9e3779b9u};
  return Engine(seq);
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Engine& e) {
  return static_cast<double>(e() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by 64x64 multiply-high; bias is below n / 2^64.
__extension__ typedef unsigned __int128 uint128;

inline std::uint64_t uniform_below(Engine& e, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<uint128>(e()) * n) >> 64);
}

/// Standard normal draw (ziggurat).
class NormalSource {
 public:
  double operator()(Engine& e) { return dist_(e); }

 private:
  boost::random::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace erw
