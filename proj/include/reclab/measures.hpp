// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "reclab/geometry.hpp"
#include "reclab/maps.hpp"

namespace reclab {

enum class DensityKind { Lebesgue, ParryBeta, Ulam, Product };

const char* to_string(DensityKind kind);

/// Model of an invariant density on [0,1)^d. Immutable once built.
class DensityModel {
 public:
  static DensityModel lebesgue(unsigned dimension = 1);
  /// Closed-form Parry density, series over the orbit of 1 truncated at n_max.
  static DensityModel parry(double beta, unsigned n_max = 200);
  /// Stationary vector of the Ulam discretisation of a 1-d beta map.
  static DensityModel ulam(const ExpandingMap& map, unsigned bins,
                           std::size_t max_iterations = 100000);
  /// Piecewise-constant density from bin weights summing to 1.
  static DensityModel from_weights(std::vector<double> weights);
  static DensityModel product(std::vector<DensityModel> factors);

  DensityKind kind() const { return kind_; }
  unsigned dimension() const { return dimension_; }

  /// 1-d models only.
  double density(double x) const;
  double cdf(double x) const;
  double inverse_cdf(double u) const;

  /// The 1-d model governing coordinate i (product structure).
  const DensityModel& factor(unsigned i) const;

  double parry_beta() const { return beta_; }
  const std::vector<double>& weights() const { return weights_; }
  unsigned bins() const { return static_cast<unsigned>(weights_.size()); }
  /// Power iterations used to build an Ulam model.
  std::size_t iterations() const { return iterations_; }

  std::optional<double> density_sup;

  /// Discretised integral of h^q over a uniform grid (1-d models); a finite
  /// proxy for the L^q hypothesis, not a certificate.
  double lq_integral(double q, unsigned grid = 1 << 14) const;

 private:
  DensityModel() = default;

  DensityKind kind_ = DensityKind::Lebesgue;
  unsigned dimension_ = 1;
  double beta_ = 0.0;
  // Piecewise-linear CDF: sorted breakpoints with CDF values (Parry, Ulam).
  std::vector<double> knots_;
  std::vector<double> knot_cdf_;
  std::vector<double> weights_;
  std::size_t iterations_ = 0;
  std::vector<std::shared_ptr<const DensityModel>> factors_;
};

/// Parry density of the beta map at x, normalised to total mass 1.
double parry_density(double beta, double x, unsigned n_max = 200);

/// Measure of an interval [a, b) under a 1-d model, clipped to [0,1).
double interval_measure(const DensityModel& density, double a, double b);

/// mu(R(x, r)); with clip the rectangle is intersected with [0,1)^d,
/// otherwise the Lebesgue value is the unclipped product.
double measure_of_rect(const DensityModel& density, const Target& rect, bool clip = true);

struct ScaleResult {
  double l = 0.0;
  std::vector<double> xi;
  double residual = 0.0;
  unsigned iterations = 0;
};

/// l_n(x): the scale with mu(R(x, l r_n)) = prod r_{n,i}, by bisection.
ScaleResult scale_to_measure(const DensityModel& density, const Point& x,
                             const std::vector<double>& r_n);

/// |mu(T^{-1} I) - mu(I)| for an interval I, via exact branch preimages.
double invariance_residual(const ExpandingMap& map, const DensityModel& density, Interval interval);

}  // namespace reclab
