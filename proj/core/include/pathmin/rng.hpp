#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace pathmin {

/// Philox4x32-10 block function. Exposed for known-answer testing.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to derive per-trial and per-cell seeds.
std::uint64_t mix64(std::uint64_t x);

/// Combines a seed with any number of indices into a new 64-bit seed.
template <typename... Ts>
std::uint64_t derive_seed(std::uint64_t seed, Ts... indices) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  ((h = mix64(h ^ mix64(static_cast<std::uint64_t>(indices) + 0x9e3779b97f4a7c15ULL))), ...);
  return h;
}

/// Counter-based generator keyed by (seed, stream).
///
/// The seed is the Philox key and the stream id occupies the upper half of the
/// 128-bit counter, so distinct streams of one seed never overlap and any
/// stream can be created independently of the others. Satisfies
/// UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform_open() noexcept;
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

  /// Independent generator sharing this seed but on another stream.
  CounterRng substream(std::uint64_t stream) const noexcept { return CounterRng(seed_, stream); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  /// Number of 64-bit words drawn so far.
  std::uint64_t draws() const noexcept { return draws_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  std::uint64_t draws_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace pathmin
