// SPDX-License-Identifier: Apache-2.0
#include "reclab/orbit.hpp"

#include <cmath>

#include "reclab/error.hpp"
#include "reclab/simd/kernels.hpp"

namespace reclab {
namespace {

unsigned power_of_two_shift(std::int64_t b) {
  const std::uint64_t m = static_cast<std::uint64_t>(b < 0 ? -b : b);
  if (m < 2 || (m & (m - 1)) != 0) return 0;
  return static_cast<unsigned>(__builtin_ctzll(m));
}

}  // namespace

std::uint64_t to_fixed(double x) {
  return static_cast<std::uint64_t>(std::floor(std::ldexp(x, 64)));
}

// Uniform bits below the precision of x, so the fixed-point start is a
// random refinement of the double instead of ending in a run of zeros.
static std::uint64_t sub_ulp_bits(double x, PointStream& stream) {
  const double span = std::ldexp(std::nextafter(x, 2.0) - x, 64);
  if (span < 2.0) return 0;
  return stream.next_bits(static_cast<unsigned>(std::ilogb(span)));
}

OrbitBatch::OrbitBatch(const ExpandingMap& map, std::uint64_t seed, std::size_t first_index,
                       std::size_t count)
    : map_(map),
      dim_(map.dimension()),
      count_(count),
      matrix_(map.kind() == MapKind::IntegerMatrix),
      fixed_(dim_, false),
      slope_(dim_, 0),
      shift_(dim_, 0),
      initial_(dim_, std::vector<double>(count)),
      current_(dim_, std::vector<double>(count)),
      state_(dim_),
      tail_(dim_),
      scratch_(matrix_ ? dim_ : 0) {
  require(!matrix_ || dim_ <= 16, ErrorCode::Domain, "integer matrix dimension limited to 16");
  bool any_fixed = false;
  for (unsigned i = 0; i < dim_; ++i) {
    if (matrix_) {
      fixed_[i] = true;
    } else {
      const double b = map.betas()[i];
      fixed_[i] = b == std::nearbyint(b) && std::fabs(b) < 9.2e18;
      if (fixed_[i]) {
        slope_[i] = static_cast<std::int64_t>(b);
        shift_[i] = power_of_two_shift(slope_[i]);
      }
    }
    if (fixed_[i]) {
      state_[i].resize(count);
      tail_[i].resize(count);
      any_fixed = true;
    }
  }
  for (auto& s : scratch_) s.resize(count);
  if (any_fixed) {
    streams_.reserve(count);
    for (std::size_t p = 0; p < count; ++p) {
      streams_.emplace_back(seed, StreamPurpose::Tail, first_index + p);
    }
  }
}

void OrbitBatch::set_point(std::size_t p, std::span<const double> x) {
  require(x.size() == dim_ && in_unit_cube(x), ErrorCode::Domain,
          "point must lie in [0,1)^d");
  for (unsigned i = 0; i < dim_; ++i) {
    initial_[i][p] = x[i];
    current_[i][p] = x[i];
    if (fixed_[i]) state_[i][p] = to_fixed(x[i]) + sub_ulp_bits(x[i], streams_[p]);
  }
}

// Carry into the fixed-point state from the discarded fractional tail:
// floor(b * tau) with tau uniform on [0,1), sampled afresh each step.
void OrbitBatch::draw_tails() {
  if (matrix_) {
    for (std::size_t p = 0; p < count_; ++p) {
      auto& stream = streams_[p];
      std::uint64_t u[16];
      for (unsigned j = 0; j < dim_; ++j) u[j] = stream.next_u64();
      for (unsigned i = 0; i < dim_; ++i) {
        __int128 acc = 0;
        for (unsigned j = 0; j < dim_; ++j) {
          acc += static_cast<__int128>(map_.entry(i, j)) * static_cast<__int128>(u[j]);
        }
        tail_[i][p] = static_cast<std::uint64_t>(static_cast<std::int64_t>(acc >> 64));
      }
    }
    return;
  }
  for (unsigned i = 0; i < dim_; ++i) {
    if (!fixed_[i]) continue;
    const std::int64_t b = slope_[i];
    const std::uint64_t m = static_cast<std::uint64_t>(b < 0 ? -b : b);
    const unsigned k = shift_[i];
    auto& tail = tail_[i];
    for (std::size_t p = 0; p < count_; ++p) {
      const std::uint64_t carry = k ? streams_[p].next_bits(k) : streams_[p].next_below(m);
      tail[p] = b > 0 ? carry : ~carry;  // ~c == -(c + 1)
    }
  }
}

void OrbitBatch::step() {
  const auto& kern = simd::active_kernels();
  const bool any_fixed = !streams_.empty();
  if (any_fixed) draw_tails();

  if (matrix_) {
    for (unsigned i = 0; i < dim_; ++i) {
      auto& out = scratch_[i];
      for (std::size_t p = 0; p < count_; ++p) out[p] = tail_[i][p];
      for (unsigned j = 0; j < dim_; ++j) {
        const auto a = static_cast<std::uint64_t>(map_.entry(i, j));
        const auto& x = state_[j];
        for (std::size_t p = 0; p < count_; ++p) out[p] += a * x[p];
      }
    }
    for (unsigned i = 0; i < dim_; ++i) {
      state_[i].swap(scratch_[i]);
      kern.fixed_to_unit_f64(state_[i].data(), current_[i].data(), count_);
    }
    return;
  }

  for (unsigned i = 0; i < dim_; ++i) {
    if (fixed_[i]) {
      kern.fixed_affine_step_u64(static_cast<std::uint64_t>(slope_[i]), state_[i].data(),
                                 tail_[i].data(), count_);
      kern.fixed_to_unit_f64(state_[i].data(), current_[i].data(), count_);
    } else {
      kern.beta_step_f64(map_.betas()[i], current_[i].data(), count_);
    }
  }
}

}  // namespace reclab
