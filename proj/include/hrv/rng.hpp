#pragma once

// Counter-based random numbers.
//
// Every stochastic object in the library is drawn from a PhiloxEngine whose
// (key, stream) pair is derived from a master seed and a list of integer
// coordinates (experiment, t index, set index, chunk, ...). Replication r of
// experiment e is therefore a pure function of (master_seed, e, r) no matter
// how the work is split across threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace hrv {

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static constexpr Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// UniformRandomBitGenerator over 64-bit words. The counter layout is
/// (block_lo, block_hi, stream_lo, stream_hi); each block yields two words.
class PhiloxEngine {
 public:
  using result_type = std::uint64_t;

  constexpr PhiloxEngine(std::uint64_t key, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    if (lane_ == 2) refill();
    return buffer_[lane_++];
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard exponential.
  double exponential() noexcept { return -std::log(uniform()); }

  constexpr std::uint64_t blocks_used() const noexcept { return block_; }

 private:
  constexpr void refill() noexcept {
    const Philox4x32::Counter ctr{
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const auto out = Philox4x32::apply(ctr, key_);
    buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    ++block_;
    lane_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int lane_ = 2;
};

/// Engine for the stream addressed by `coords` under `master_seed`.
inline PhiloxEngine derive_engine(std::uint64_t master_seed,
                                  std::initializer_list<std::uint64_t> coords) noexcept {
  std::uint64_t h = splitmix64(0x68727673ull ^ coords.size());
  for (const auto c : coords) h = splitmix64(h ^ splitmix64(c));
  return PhiloxEngine(splitmix64(master_seed), h);
}

/// Uniform (0,1) draw from any 64-bit UniformRandomBitGenerator.
template <class Rng>
double uniform_open(Rng& rng) {
  static_assert(Rng::min() == 0 && Rng::max() == std::numeric_limits<std::uint64_t>::max(),
                "expects a full-range 64-bit generator");
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

template <class Rng>
double exponential(Rng& rng) {
  return -std::log(uniform_open(rng));
}

}  // namespace hrv
