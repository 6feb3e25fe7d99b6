#pragma once

#include <cstdint>
#include <cmath>

namespace cpb {

namespace detail {

// splitmix64 finalizer; also used to expand seeds into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// xoshiro256++ with splittable streams.
//
// A stream is identified by (seed, path of fork indices); forked streams get
// statistically independent state via splitmix64 key derivation, so replicate
// j of run i can be reproduced in isolation as
//   RngStream(seed).fork(i).fork(j)
// regardless of scheduling. All draws are computed from explicit integer
// arithmetic (no std::*_distribution), so sequences are identical across
// platforms and standard libraries.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed) : RngStream(seed, 0) {}

  RngStream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t a = seed;
    std::uint64_t b = stream ^ 0x517cc1b727220a95ULL;
    std::uint64_t key = detail::splitmix64(a) ^ detail::rotl64(detail::splitmix64(b), 32);
    init_state(key);
  }

  // Child stream; independent of how far this stream has been consumed.
  RngStream fork(std::uint64_t stream) const {
    return RngStream(derive_key(stream));
  }

  // Seed value that reproduces fork(stream) via RngStream(key).
  std::uint64_t derive_key(std::uint64_t stream) const {
    std::uint64_t a = key_;
    std::uint64_t b = stream ^ 0x6a09e667f3bcc909ULL;
    return detail::splitmix64(a) ^ detail::rotl64(detail::splitmix64(b), 32);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl64(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl64(s_[3], 45);
    return result;
  }

  // Uniform on [0,1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1]; safe as a log() argument.
  double next_double_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the paired draw is cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_double_open();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Unbiased uniform integer on [0, bound), bound >= 1 (Lemire rejection).
  std::uint64_t uniform_below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  std::uint64_t operator()() { return next_u64(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~0ULL; }

 private:
  void init_state(std::uint64_t key) {
    key_ = key;
    std::uint64_t sm = key;
    for (auto& word : s_) word = detail::splitmix64(sm);
  }

  std::uint64_t key_ = 0;
  std::uint64_t s_[4] = {};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cpb
