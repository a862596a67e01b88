// SPDX-License-Identifier: Apache-2.0
#include "reclab/rng.hpp"

namespace reclab {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t product = std::uint64_t{a} * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

PointStream::PointStream(std::uint64_t seed, StreamPurpose purpose,
                         std::uint64_t item)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32) ^
               (static_cast<std::uint32_t>(purpose) * 0x85EBCA6Bu)},
      item_(item) {}

void PointStream::refill() {
  const Philox4x32::Counter ctr{
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(item_), static_cast<std::uint32_t>(item_ >> 32)};
  const auto out = Philox4x32::generate(ctr, key_);
  buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
  buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
  buffered_ = 2;
  ++block_;
}

std::uint64_t PointStream::next_u64() {
  if (buffered_ == 0) refill();
  return buffer_[2 - buffered_--];
}

double PointStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t PointStream::next_below(std::uint64_t bound) {
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * bound;
  return static_cast<std::uint64_t>(wide >> 64);
}

std::uint64_t PointStream::next_bits(unsigned count) {
  if (count == 0) return 0;
  if (count >= 64) return next_u64();
  if (bits_left_ < count) {
    bits_ = next_u64();
    bits_left_ = 64;
  }
  const std::uint64_t value = bits_ & ((std::uint64_t{1} << count) - 1);
  bits_ >>= count;
  bits_left_ -= count;
  return value;
}

}  // namespace reclab
