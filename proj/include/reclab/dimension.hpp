// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "reclab/maps.hpp"
#include "reclab/schedule.hpp"

namespace reclab {

/// Index sets are 0-based coordinate indices.
struct ThetaResult {
  double theta = 0.0;
  std::vector<unsigned> K1, K2, K3;
};

/// Per-coordinate dimension exponent theta_i(t).
ThetaResult theta(const std::vector<double>& betas, const std::vector<double>& t, unsigned i);

/// Rectangle-to-rectangle mass transference exponent s(u, v, i).
ThetaResult mtp_exponent(const std::vector<double>& deltas, const std::vector<double>& u,
                         const std::vector<double>& v, unsigned i);

struct DimensionResult {
  double dimension = 0.0;
  std::vector<double> argsup;
  /// min_i theta_i(t) for every t in the set, in input order.
  std::vector<double> min_theta;
};

/// sup over the (finite) accumulation set of min_i theta_i(t).
DimensionResult recurrence_dimension(const std::vector<double>& betas,
                                     const std::vector<std::vector<double>>& accumulation);

/// Cluster points of (-log psi_i(n)/n)_i. Parametric schedules return the
/// closed form; tables are sampled on multiples of `stride` in the upper
/// half of [n_min, n_max] and clustered greedily at max-norm `tolerance`.
std::vector<std::vector<double>> accumulation_set(const RadiiSchedule& schedule, unsigned stride,
                                                  std::size_t n_min, std::size_t n_max,
                                                  double tolerance = 1e-3);

/// Whether stride-k and stride-1 accumulation sets agree within tolerance.
bool accumulation_invariant(const RadiiSchedule& schedule, unsigned stride, std::size_t n_min,
                            std::size_t n_max, double tolerance = 1e-3);

struct CoverInterval {
  Interval cylinder;
  /// Exact {x in cylinder : |T^n x - x| < r}; empty when left == right.
  Interval exact;
};

struct RecurrenceCover {
  std::vector<CoverInterval> intervals;
  /// Length 6 r / |beta|^n of the coarse cover interval per cylinder.
  double bound_length = 0.0;
  double total_exact_length = 0.0;
};

RecurrenceCover recurrence_cover(const ExpandingMap& map, unsigned n, double r);

struct CriticalExponent {
  double s_star = 0.0;
  /// Per-coordinate exponents (d >= 2); s_star is their minimum.
  std::vector<double> per_coordinate;
  unsigned argmin = 0;
  std::vector<double> s_grid;
  /// Sum over the window of the cover cost, for the minimising coordinate.
  std::vector<double> window_cost;
  /// Fitted exponential growth rate of the per-n cost in n.
  std::vector<double> growth_rate;
  /// Smallest grid s with window cost < 1, if any (finite-window diagnostic).
  std::optional<double> threshold_s;
};

/// Critical exponent of the natural cover over n in [n0, n1].
///
/// For each s the per-n cost log C_n(s) is regressed on (1, n, log n); the
/// coefficient of n is the exponential growth rate, and s* is its zero on
/// the grid (linear interpolation). d = 1 uses exact recurrence intervals;
/// d >= 2 uses the coordinatewise ball-count bound.
CriticalExponent cover_critical_exponent(const std::vector<double>& betas,
                                         const RadiiSchedule& schedule, std::size_t n0,
                                         std::size_t n1, const std::vector<double>& s_grid);

std::vector<double> default_s_grid(unsigned d);

struct MtpBound {
  double bound = 0.0;
  double theta_limit = 0.0;
  double gap = 0.0;
  std::vector<double> per_coordinate;
};

/// min_i s(u, v, i) with u_k = (1 - eps) log|beta_k|, v = u + t.
MtpBound mtp_lower_bound(const std::vector<double>& betas, const std::vector<double>& deltas,
                         const std::vector<double>& t, double epsilon);

}  // namespace reclab
