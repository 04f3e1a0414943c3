#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace regen {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit key is the master seed and the upper half of the 128-bit
/// counter is the stream id, so every (seed, stream) pair addresses an
/// independent sequence without any shared state. Satisfies
/// UniformRandomBitGenerator.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Skip ahead by `blocks` 4-word output blocks.
  void discard_blocks(std::uint64_t blocks) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned next_ = 4;
};

/// Random stream with the handful of variates the samplers need.
///
/// Variate generation is implemented here rather than via <random>
/// distributions so that streams are reproducible across standard
/// library implementations.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : engine_(seed, stream) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1].
  double uniform_pos() noexcept { return 1.0 - uniform(); }
  /// Exponential with unit mean.
  double exponential() noexcept;
  /// Standard normal (Box-Muller, caching the second variate).
  double normal() noexcept;

  std::uint64_t stream_id() const noexcept { return engine_.stream(); }
  Philox4x32& engine() noexcept { return engine_; }

 private:
  Philox4x32 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Stream id for replicate `index` of an experiment of the given kind.
/// A pure function of its arguments; combined with the master seed as the
/// Philox key this gives the stream for that replicate.
std::uint64_t derive_stream_id(std::string_view experiment_kind,
                               std::uint64_t index) noexcept;

}  // namespace regen
