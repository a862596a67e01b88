// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reclab/maps.hpp"
#include "reclab/rng.hpp"

namespace reclab {

/// A batch of orbits advanced in lockstep, stored one array per coordinate.
///
/// Coordinates with integer slope (and all coordinates of integer-matrix
/// maps) run in 64-bit fixed point. Each step draws fresh sub-ulp bits for
/// the part of the state below 2^-64, so x -> 2x mod 1 keeps producing
/// random digits instead of collapsing to 0 after 53 steps. Other
/// coordinates iterate frac(beta x) in double precision.
///
/// Tail bits come from a per-point counter-based stream keyed by
/// (seed, point index), so results never depend on how points are batched.
class OrbitBatch {
 public:
  OrbitBatch(const ExpandingMap& map, std::uint64_t seed, std::size_t first_index,
             std::size_t count);

  std::size_t size() const { return count_; }
  unsigned dimension() const { return dim_; }

  void set_point(std::size_t p, std::span<const double> x);
  /// Apply T once to every point.
  void step();
  /// Current coordinate i of every point, each in [0,1).
  const double* coordinate(unsigned i) const { return current_[i].data(); }
  /// Starting coordinate i of every point.
  const double* initial(unsigned i) const { return initial_[i].data(); }

 private:
  void draw_tails();

  ExpandingMap map_;
  unsigned dim_;
  std::size_t count_;
  bool matrix_;
  std::vector<bool> fixed_;         // per coordinate
  std::vector<std::int64_t> slope_; // integer slope per fixed coordinate
  std::vector<unsigned> shift_;     // log2|slope| when a power of two, else 0
  std::vector<std::vector<double>> initial_;
  std::vector<std::vector<double>> current_;
  std::vector<std::vector<std::uint64_t>> state_;
  std::vector<std::vector<std::uint64_t>> tail_;
  std::vector<std::vector<std::uint64_t>> scratch_;
  std::vector<PointStream> streams_;
};

/// Fixed-point image of x in [0,1): floor(x * 2^64).
std::uint64_t to_fixed(double x);

}  // namespace reclab
