// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace reclab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A bijection of a 128-bit counter under a 64-bit key. Every random number
/// in the library is a pure function of (seed, purpose, item index, draw
/// index), so parallel fan-out and chunking never change results.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

/// Independent stream domains; folded into the key so that e.g. initial
/// sampling and orbit tails of the same point never share numbers.
enum class StreamPurpose : std::uint32_t {
  Sample = 0,
  Tail = 1,
  Probe = 2,
  Auxiliary = 3,
};

/// Sequential view of the counter space belonging to one item.
class PointStream {
 public:
  PointStream() = default;
  PointStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t item);

  std::uint64_t next_u64();
  /// Uniform on [0,1) with 53 random bits.
  double next_unit();
  /// Uniform integer in [0, bound) by 128-bit multiply-shift.
  std::uint64_t next_below(std::uint64_t bound);
  /// `count` random bits (count <= 64) drawn from an internal bit reservoir.
  std::uint64_t next_bits(unsigned count);

 private:
  void refill();

  Philox4x32::Key key_{};
  std::uint64_t item_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  unsigned buffered_ = 0;
  std::uint64_t bits_ = 0;
  unsigned bits_left_ = 0;
};

}  // namespace reclab
