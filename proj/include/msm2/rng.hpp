#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

// Counter-based random number generation (Philox4x32-10, Salmon et al. 2011).
//
// Every draw is a pure function of (seed, stream, counter), so parallel code
// can hand each logical unit of work (a simulated subject, a bootstrap
// resample) its own stream and produce results that do not depend on thread
// count or scheduling order.

namespace msm2::rng {

inline constexpr const char* kGeneratorId = "philox4x32-10";

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

namespace detail {

inline constexpr std::uint32_t kMult0 = 0xD2511F53u;
inline constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline Counter round(const Counter& x, const Key& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMult0, x[0], hi0, lo0);
  mulhilo(kMult1, x[2], hi1, lo1);
  return Counter{hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace detail

/// One Philox4x32 block: 10 rounds, key bumped by the Weyl constants between
/// rounds.  Returns 128 random bits as four 32-bit words.
inline Counter philox4x32(Counter ctr, Key key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += detail::kWeyl0;
      key[1] += detail::kWeyl1;
    }
    ctr = detail::round(ctr, key);
  }
  return ctr;
}

namespace detail {

inline Counter block(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t counter) {
  const Counter ctr{static_cast<std::uint32_t>(counter),
                    static_cast<std::uint32_t>(counter >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  const Key key{static_cast<std::uint32_t>(seed),
                static_cast<std::uint32_t>(seed >> 32)};
  return philox4x32(ctr, key);
}

}  // namespace detail

/// 64 uniform random bits for the given (seed, stream, counter) triple.
inline std::uint64_t uniform_bits(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t counter) {
  const Counter out = detail::block(seed, stream, counter);
  return static_cast<std::uint64_t>(out[0]) |
         (static_cast<std::uint64_t>(out[1]) << 32);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t counter) {
  return static_cast<double>(uniform_bits(seed, stream, counter) >> 11) *
         0x1.0p-53;
}

/// Standard normal draw via Box-Muller on one 128-bit block.  u1 lies in
/// (0, 1] so the log never sees zero.
inline double standard_normal(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t counter) {
  const Counter out = detail::block(seed, stream, counter);
  const std::uint64_t a = static_cast<std::uint64_t>(out[0]) |
                          (static_cast<std::uint64_t>(out[1]) << 32);
  const std::uint64_t b = static_cast<std::uint64_t>(out[2]) |
                          (static_cast<std::uint64_t>(out[3]) << 32);
  const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

/// Sequential view of one stream: draw k advances an internal counter, so a
/// consumer gets the fixed sequence (seed, stream, 0), (seed, stream, 1), ...
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  double uniform() { return uniform01(seed_, stream_, counter_++); }
  double normal() { return standard_normal(seed_, stream_, counter_++); }
  std::uint64_t bits() { return uniform_bits(seed_, stream_, counter_++); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace msm2::rng
