// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "reclab/dimension.hpp"
#include "reclab/maps.hpp"
#include "reclab/rng.hpp"

namespace reclab {

/// Order-m cylinders that T^m maps onto [0,1).
std::vector<Cylinder> full_cylinders(const ExpandingMap& map, unsigned m);

/// Homogeneous self-similar subsystem generated by the full cylinders of
/// one order, with the uniform Bernoulli measure on branches.
struct FullSubshift {
  double beta = 2.0;
  double epsilon = 0.0;
  unsigned m = 1;
  /// Exact while below 2^53.
  double branch_count = 0.0;
  double delta = 0.0;
  /// Integer beta: every order-m cylinder is full, nothing is stored.
  bool integer_beta = false;
  /// Left endpoints of the branches in increasing order (non-integer beta).
  std::vector<double> lefts;

  double branch_length() const;
  /// The order-m full cylinders as intervals (non-integer beta, or small m).
  std::vector<Interval> branches() const;
};

/// First admissible block length: the least integer m > (1 + log 8)/(eps log beta).
unsigned initial_block_length(double beta, double epsilon);

/// Increases m from the initial block length until delta >= 1 - eps.
/// Throws Construction (with the best delta) once an order would need more
/// than `leaf_guard` enumerated cylinders.
FullSubshift build_full_subshift(const ExpandingMap& map, double epsilon,
                                 std::uint64_t leaf_guard = std::uint64_t{1} << 25);

/// nu([a,b]) by exact counting on the branch tree down to `depth` levels.
double subshift_measure(const FullSubshift& sub, double a, double b, unsigned depth);

/// A nu-distributed point of the attractor.
double sample_attractor_point(const FullSubshift& sub, PointStream& stream);

struct AhlforsRow {
  double r = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

struct AhlforsResult {
  double a = 0.0;
  double b = 0.0;
  double ratio = 0.0;
  bool pass = false;
  std::vector<AhlforsRow> rows;
};

/// Empirical a, b with a r^delta <= nu(B(x,r)) <= b r^delta over sampled x.
AhlforsResult ahlfors_check(const FullSubshift& sub, const std::vector<double>& radii,
                            std::size_t samples, std::uint64_t seed);

/// 1 - log 8 / log beta, the reference lower bound for the subsystem dimension.
double reference_subsystem_bound(double beta);

/// Lower bound with deltas taken from per-coordinate subshifts.
MtpBound mtp_dimension_bound(const std::vector<FullSubshift>& subshifts,
                             const std::vector<double>& t);

}  // namespace reclab
