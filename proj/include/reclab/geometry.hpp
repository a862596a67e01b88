// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "reclab/maps.hpp"

namespace reclab {

enum class TargetKind { Rect, Hyperboloid };

const char* to_string(TargetKind kind);

/// Recurrence target centred at a point: an open max-norm rectangle
/// R(x, r) or the hyperboloid neighbourhood H(x, delta).
struct Target {
  TargetKind kind = TargetKind::Rect;
  Point center;
  std::vector<double> radii;
  double delta = 0.0;

  static Target rect(Point center, std::vector<double> radii);
  static Target hyperboloid(Point center, double delta);
};

/// Strict membership; no clipping to the unit cube.
bool contains(const Target& target, std::span<const double> y);

/// Unclipped volume prod 2 r_i.
double rect_volume(std::span<const double> radii);

/// Lebesgue measure of B(x, r) intersected with H(x, delta), max norm:
/// 2^d delta sum_{t<d} (log(r^d/delta))^t / t!. Requires 0 < delta < r^d, r < 1.
double hyperboloid_ball_volume(double r, double delta, unsigned d);

struct HyperboloidBounds {
  double upper = 0.0;
  double lower = 0.0;
  /// The lower bound is only asserted when r^d > sqrt(delta).
  std::optional<bool> lower_applies;
  std::optional<double> exact;
  std::optional<bool> within;
};

HyperboloidBounds hyperboloid_volume_bounds(double delta, unsigned d,
                                            std::optional<double> r = std::nullopt);

struct VolumeEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo volume of B(0, r) intersected with H(0, delta), uniform
/// sampling of the cube [-r, r]^d.
VolumeEstimate hyperboloid_volume_mc(double r, double delta, unsigned d, std::size_t samples,
                                     std::uint64_t seed);

struct Box {
  Point lo;
  Point hi;
  double volume() const;
};

using Indicator = std::function<bool(std::span<const double>)>;

struct MinkowskiEstimate {
  double epsilon = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  std::size_t boundary_hits = 0;
};

/// Monte Carlo estimate of vol(boundary neighbourhood of A at scale eps)/eps.
///
/// A sample y counts when the cube of radius eps around it contains both a
/// member and a non-member, tested on the 3^d stencil y + eps{-1,0,1}^d and
/// 32 uniform probes in the cube. Probes may leave the box; the indicator
/// decides membership there too.
std::vector<MinkowskiEstimate> minkowski_content_estimate(const Indicator& indicator,
                                                          const Box& box,
                                                          const std::vector<double>& epsilons,
                                                          std::size_t samples,
                                                          std::uint64_t seed);

}  // namespace reclab
