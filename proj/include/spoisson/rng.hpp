#pragma once

#include <array>
#include <cstdint>

namespace spoisson {

/// Philox4x32-10 counter-based generator.
///
/// A stream is a (seed, 128-bit counter) pair; every variate is a pure
/// function of both, so draws can be generated in any order or on any thread.
/// Counter words are (block, component, draw, tag), with `tag` separating
/// independent uses of the same seed.
class Philox {
 public:
  using Counter = std::array<std::uint32_t, 4>;

  Philox(std::uint64_t seed, Counter counter) noexcept;

  /// Four uniform 32-bit words from the current counter; the block word then advances.
  std::array<std::uint32_t, 4> next_block() noexcept;

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  /// Standard normal via Box-Muller; consumes one block per pair of variates.
  double normal() noexcept;

  static std::array<std::uint32_t, 4> bijection(Counter counter, std::array<std::uint32_t, 2> key) noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  Counter counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Stream tags for the fixed uses of the config seed.
enum class StreamTag : std::uint32_t {
  FieldSample = 1,
  ExactSampler = 2,
  PairSampling = 3,
  DensityScan = 4,
  SolverNoise = 5,
  SolverStart = 6,
  MonteCarlo = 7,
  Probe = 8,
};

/// Stream for (draw, component) of a given use.
Philox make_stream(std::uint64_t seed, StreamTag tag, std::uint32_t draw, std::uint32_t component = 0) noexcept;

}  // namespace spoisson
