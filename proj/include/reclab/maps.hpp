// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace reclab {

using Point = std::vector<double>;

enum class MapKind { Beta, Diagonal, IntegerMatrix };

const char* to_string(MapKind kind);

/// Piecewise-affine expanding self-map of [0,1)^d.
class ExpandingMap {
 public:
  static ExpandingMap beta(double beta);
  static ExpandingMap diagonal(std::vector<double> betas);
  /// Rows of a square integer matrix; rejected unless every eigenvalue
  /// modulus exceeds 1 by more than 1e-9.
  static ExpandingMap integer_matrix(const std::vector<std::vector<std::int64_t>>& rows);

  MapKind kind() const { return kind_; }
  unsigned dimension() const { return dimension_; }
  /// Beta kind only.
  double beta() const;
  /// Per-coordinate slopes (Beta: one entry; Diagonal: d entries).
  const std::vector<double>& betas() const { return betas_; }
  /// Row-major d*d entries (IntegerMatrix only).
  const std::vector<std::int64_t>& matrix() const { return matrix_; }
  std::int64_t entry(unsigned row, unsigned col) const { return matrix_[row * dimension_ + col]; }
  double expansion_L() const { return expansion_; }
  /// Number of branches; unknown for integer matrices.
  std::optional<unsigned> branch_count() const;
  /// True when every slope is an integer, so orbits can run in fixed point.
  bool integer_slopes() const { return integer_slopes_; }
  /// The 1-d map acting on coordinate i (Beta/Diagonal kinds).
  ExpandingMap coordinate(unsigned i) const;

 private:
  ExpandingMap() = default;

  MapKind kind_ = MapKind::Beta;
  unsigned dimension_ = 1;
  std::vector<double> betas_;
  std::vector<std::int64_t> matrix_;
  double expansion_ = 0.0;
  bool integer_slopes_ = false;
};

/// y - floor(y), clamped so the result is always < 1.
double frac_unit(double y);
/// One step of x -> frac(beta x).
double beta_step(double beta, double x);

bool in_unit_cube(std::span<const double> x);

Point apply(const ExpandingMap& map, const Point& x);
std::vector<Point> iterate(const ExpandingMap& map, const Point& x, std::size_t n);

struct Interval {
  double left = 0.0;
  double right = 0.0;
  double length() const { return right - left; }
};

/// Q_k = [k/|beta|, (k+1)/|beta|) clipped to [0,1); ceil(|beta|) pieces.
std::vector<Interval> base_partition(const ExpandingMap& map);

/// T^{-1}[a,b) as a union of intervals, one per branch that meets it.
std::vector<Interval> preimage_intervals(const ExpandingMap& map, Interval target);

struct Cylinder {
  unsigned order = 0;
  double left = 0.0;
  double right = 0.0;
  double slope = 1.0;
  double intercept = 0.0;
  std::vector<std::uint32_t> word;

  /// Unreduced affine image slope*x + intercept.
  double affine(double x) const { return slope * x + intercept; }
};

/// Lightweight view handed to enumeration visitors; no allocation per node.
struct CylinderView {
  unsigned order;
  double left;
  double right;
  double slope;
  /// Limits of T^n at the left and right endpoints from inside.
  double image_at_left;
  double image_at_right;
  std::span<const std::uint32_t> word;

  double intercept() const { return image_at_left - slope * left; }
  bool full() const;
};

/// Depth-first enumeration of the order-n cylinders in left-to-right order.
void for_each_cylinder(const ExpandingMap& map, unsigned n,
                       const std::function<void(const CylinderView&)>& visit);

std::vector<Cylinder> cylinders(const ExpandingMap& map, unsigned n);
std::size_t cylinder_count(const ExpandingMap& map, unsigned n);

struct EntropyCheck {
  std::size_t count = 0;
  double bound = 0.0;
  bool pass = false;
  double log_count_per_n = 0.0;
};

EntropyCheck entropy_count_check(const ExpandingMap& map, unsigned n, double epsilon);

/// Throws unless n*log|beta| < 700.
void check_cylinder_guard(double beta, unsigned n);

}  // namespace reclab
