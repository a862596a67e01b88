// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reclab/geometry.hpp"
#include "reclab/maps.hpp"
#include "reclab/measures.hpp"
#include "reclab/rng.hpp"
#include "reclab/schedule.hpp"

namespace reclab {

/// Does T^n x land in R(x, r_n) (or H(x, delta_n))? Iterates in double.
bool hit(const ExpandingMap& map, const Point& x, std::size_t n, const RadiiSchedule& schedule,
         TargetKind target);

/// For each order-n cylinder of a beta map, the exact set
/// {x in C : |T^n x - x| < r}, clipped to C (possibly empty).
void for_each_recurrence_interval(
    const ExpandingMap& map, unsigned n, double r,
    const std::function<void(const CylinderView&, Interval)>& visit);

/// Lebesgue measure of E_n = {x : T^n x in R(x, r)} for beta or diagonal maps.
double exact_En_measure(const ExpandingMap& map, unsigned n, const std::vector<double>& r);

/// Draw one point from a product density by per-coordinate inverse CDF.
Point sample_point(const DensityModel& density, unsigned d, PointStream& stream);

struct DichotomyOptions {
  std::size_t samples = 10000;
  std::size_t horizon = 10000;
  std::uint64_t seed = 0;
  TargetKind target = TargetKind::Rect;
  /// Largest n for which the exact measure column is filled.
  unsigned exact_max_order = 16;
  /// Skip the M >= 1e3, N >= 1e2 floor (unit tests only).
  bool allow_small = false;
};

struct SeriesRow {
  std::size_t n = 0;
  std::optional<double> exact;
  double mc_estimate = 0.0;
  double mc_stderr = 0.0;
  double partial_sum = 0.0;
};

struct TailWindow {
  std::size_t begin = 0;
  std::size_t end = 0;  // inclusive
  bool complete = false;
  double hit_fraction = 0.0;
};

struct DichotomyReport {
  std::vector<SeriesRow> rows;
  std::vector<std::uint32_t> hits_per_point;
  std::vector<TailWindow> windows;
  /// Fraction of points with a hit in [N/2, N).
  double half_window_fraction = 0.0;
  double mean_total_hits = 0.0;
  double mean_total_hits_stderr = 0.0;
  double governing_partial_sum = 0.0;
  SeriesClassification classification;
};

DichotomyReport run_dichotomy(const ExpandingMap& map, const RadiiSchedule& schedule,
                              const DensityModel& density, const DichotomyOptions& options);

struct MixingRow {
  std::size_t n = 0;
  double covariance = 0.0;
  double correlation = 0.0;  // |covariance|
  double stderr_ = 0.0;
  bool above_floor = false;
};

struct MixingFit {
  bool available = false;
  double c = 0.0;
  double tau = 0.0;
  std::size_t points = 0;
  std::string note;
};

struct MixingReport {
  std::vector<MixingRow> rows;
  double mu_F = 0.0;
  double mu_G = 0.0;
  double noise_sigmas = 3.0;
  MixingFit fit;
};

MixingReport mixing_decay_estimate(const ExpandingMap& map, const Target& F, const Target& G,
                                   std::size_t n_min, std::size_t n_max, std::size_t samples,
                                   std::uint64_t seed, const DensityModel& density);

enum class SandwichMode { Rect, Scaled, Hyperboloid };

const char* to_string(SandwichMode mode);

struct SandwichOptions {
  SandwichMode mode = SandwichMode::Rect;
  Point x0;
  /// Half-widths of the block F = R(x0, rho); hyperboloid mode uses max rho.
  std::vector<double> rho;
  std::size_t n = 1;
  /// r_n, or {delta_n} in hyperboloid mode.
  std::vector<double> r_n;
  std::size_t probes = 10000;
  std::uint64_t seed = 0;
};

struct SandwichResult {
  bool pass = true;
  std::size_t probes = 0;
  std::size_t inner = 0;   // probes in F and T^-n(inner target)
  std::size_t event = 0;   // probes in F and E_n (or its variant)
  std::size_t outer = 0;   // probes in F and T^-n(outer target)
  std::optional<Point> witness;
  std::string violated;
};

SandwichResult sandwich_check(const ExpandingMap& map, const DensityModel& density,
                              const SandwichOptions& options);

struct ScaledRow {
  std::size_t n = 0;
  double estimate = 0.0;  // mu(B and E^_n)
  double stderr_ = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool pass = false;
};

struct ScaledReport {
  double mu_B = 0.0;
  std::vector<ScaledRow> rows;
  double pass_rate = 0.0;
};

/// Monte Carlo mu(B and E^_n) against [1/2, 2] mu(B) prod r_{n,i}, pass at 3 sigma.
ScaledReport scaled_set_measure_check(const ExpandingMap& map, const DensityModel& density,
                                      const RadiiSchedule& schedule, const Target& ball,
                                      std::size_t n_min, std::size_t n_max, std::size_t samples,
                                      std::uint64_t seed);

}  // namespace reclab
