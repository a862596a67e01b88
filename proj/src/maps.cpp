// SPDX-License-Identifier: Apache-2.0
#include "reclab/maps.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "reclab/error.hpp"

namespace reclab {
namespace {

constexpr double kSnap = 1e-12;

bool is_integer(double v) { return std::isfinite(v) && v == std::nearbyint(v); }

/// Partition geometry shared by cylinder refinement and preimages.
struct Partition {
  double beta;
  double abs_beta;
  unsigned pieces;
  std::vector<double> bounds;  // pieces + 1 entries, last is exactly 1

  explicit Partition(double b) : beta(b), abs_beta(std::fabs(b)) {
    pieces = static_cast<unsigned>(std::ceil(abs_beta));
    bounds.resize(pieces + 1);
    for (unsigned k = 0; k < pieces; ++k) bounds[k] = k / abs_beta;
    bounds[pieces] = 1.0;
  }

  /// Snap values within kSnap of a partition point (including 0 and 1).
  double snap(double y) const {
    const double k = std::nearbyint(y * abs_beta);
    if (k >= 0 && k <= pieces) {
      const double b = k >= pieces ? 1.0 : bounds[static_cast<unsigned>(k)];
      if (std::fabs(y - b) < kSnap) return b;
    }
    if (std::fabs(y - 1.0) < kSnap) return 1.0;
    if (std::fabs(y) < kSnap) return 0.0;
    return y;
  }

  /// Limit of branch k at y, taken from inside Q_k.
  double branch(unsigned k, double y) const {
    if (y == bounds[k]) return beta > 0 ? 0.0 : 1.0;
    if (y == bounds[k + 1] && (k + 1 < pieces || is_integer(abs_beta))) {
      return beta > 0 ? 1.0 : 0.0;
    }
    return beta > 0 ? beta * y - k : beta * y + k + 1;
  }
};

struct Frame {
  double left, right, slope, at_left, at_right;
  unsigned next;
};

}  // namespace

const char* to_string(MapKind kind) {
  switch (kind) {
    case MapKind::Beta: return "beta";
    case MapKind::Diagonal: return "diagonal";
    case MapKind::IntegerMatrix: return "integer_matrix";
  }
  return "?";
}

ExpandingMap ExpandingMap::beta(double beta) {
  require(std::isfinite(beta) && std::fabs(beta) > 1.0, ErrorCode::Domain,
          "expansion requires |beta|>1");
  ExpandingMap map;
  map.kind_ = MapKind::Beta;
  map.betas_ = {beta};
  map.expansion_ = std::fabs(beta);
  map.integer_slopes_ = is_integer(beta);
  return map;
}

ExpandingMap ExpandingMap::diagonal(std::vector<double> betas) {
  require(!betas.empty(), ErrorCode::Domain, "diagonal map needs at least one slope");
  double lo = INFINITY;
  bool integral = true;
  for (double b : betas) {
    require(std::isfinite(b) && std::fabs(b) > 1.0, ErrorCode::Domain,
            "expansion requires |beta|>1 in every coordinate");
    lo = std::min(lo, std::fabs(b));
    integral = integral && is_integer(b);
  }
  ExpandingMap map;
  map.kind_ = MapKind::Diagonal;
  map.dimension_ = static_cast<unsigned>(betas.size());
  map.betas_ = std::move(betas);
  map.expansion_ = lo;
  map.integer_slopes_ = integral;
  return map;
}

ExpandingMap ExpandingMap::integer_matrix(const std::vector<std::vector<std::int64_t>>& rows) {
  const std::size_t d = rows.size();
  require(d > 0, ErrorCode::Domain, "integer matrix must be non-empty");
  Eigen::MatrixXd a(d, d);
  ExpandingMap map;
  map.matrix_.reserve(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    require(rows[i].size() == d, ErrorCode::Domain, "integer matrix must be square");
    for (std::size_t j = 0; j < d; ++j) {
      require(std::llabs(rows[i][j]) < (std::int64_t{1} << 31), ErrorCode::Domain,
              "integer matrix entries must be below 2^31 in magnitude");
      a(i, j) = static_cast<double>(rows[i][j]);
      map.matrix_.push_back(rows[i][j]);
    }
  }
  const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues();
  double lo = INFINITY;
  for (Eigen::Index k = 0; k < eig.size(); ++k) lo = std::min(lo, std::abs(eig[k]));
  if (!(lo > 1.0 + 1e-9)) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "eigenvalue modulus " << lo << " must exceed 1";
    fail(ErrorCode::Domain, msg.str());
  }
  map.kind_ = MapKind::IntegerMatrix;
  map.dimension_ = static_cast<unsigned>(d);
  map.expansion_ = lo;
  map.integer_slopes_ = true;
  return map;
}

double ExpandingMap::beta() const {
  require(kind_ == MapKind::Beta, ErrorCode::Kind, "operation requires a beta map");
  return betas_[0];
}

std::optional<unsigned> ExpandingMap::branch_count() const {
  if (kind_ == MapKind::IntegerMatrix) return std::nullopt;
  unsigned count = 1;
  for (double b : betas_) count *= static_cast<unsigned>(std::ceil(std::fabs(b)));
  return count;
}

ExpandingMap ExpandingMap::coordinate(unsigned i) const {
  require(kind_ != MapKind::IntegerMatrix, ErrorCode::Kind,
          "integer matrix maps have no coordinate factors");
  require(i < dimension_, ErrorCode::Range, "coordinate index out of range");
  return beta(betas_[i]);
}

double frac_unit(double y) {
  const double f = y - std::floor(y);
  return f < 1.0 ? f : std::nextafter(1.0, 0.0);
}

double beta_step(double beta, double x) { return frac_unit(beta * x); }

bool in_unit_cube(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0 && v < 1.0; });
}

Point apply(const ExpandingMap& map, const Point& x) {
  require(x.size() == map.dimension(), ErrorCode::Domain, "point dimension mismatch");
  require(in_unit_cube(x), ErrorCode::Domain, "point must lie in [0,1)^d");
  Point y(x.size());
  if (map.kind() == MapKind::IntegerMatrix) {
    const unsigned d = map.dimension();
    for (unsigned i = 0; i < d; ++i) {
      double acc = 0.0;
      for (unsigned j = 0; j < d; ++j) acc += static_cast<double>(map.entry(i, j)) * x[j];
      y[i] = frac_unit(acc);
    }
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = beta_step(map.betas()[i], x[i]);
  }
  return y;
}

std::vector<Point> iterate(const ExpandingMap& map, const Point& x, std::size_t n) {
  std::vector<Point> orbit;
  orbit.reserve(n + 1);
  orbit.push_back(x);
  require(in_unit_cube(x) && x.size() == map.dimension(), ErrorCode::Domain,
          "point must lie in [0,1)^d");
  for (std::size_t k = 0; k < n; ++k) orbit.push_back(reclab::apply(map, orbit.back()));
  return orbit;
}

std::vector<Interval> base_partition(const ExpandingMap& map) {
  const Partition part(map.beta());
  std::vector<Interval> out;
  for (unsigned k = 0; k < part.pieces; ++k) out.push_back({part.bounds[k], part.bounds[k + 1]});
  return out;
}

std::vector<Interval> preimage_intervals(const ExpandingMap& map, Interval target) {
  const Partition part(map.beta());
  std::vector<Interval> out;
  for (unsigned k = 0; k < part.pieces; ++k) {
    const double xl = part.bounds[k], xr = part.bounds[k + 1];
    const double yl = part.branch(k, xl), yr = part.branch(k, xr);
    const double y0 = std::max(target.left, std::min(yl, yr));
    const double y1 = std::min(target.right, std::max(yl, yr));
    if (!(y1 > y0)) continue;
    auto x_of = [&](double y) { return xl + (y - yl) / part.beta; };
    double a = part.beta > 0 ? x_of(y0) : x_of(y1);
    double b = part.beta > 0 ? x_of(y1) : x_of(y0);
    a = std::clamp(a, xl, xr);
    b = std::clamp(b, xl, xr);
    if (b > a) out.push_back({a, b});
  }
  std::sort(out.begin(), out.end(), [](const Interval& p, const Interval& q) { return p.left < q.left; });
  return out;
}

bool CylinderView::full() const {
  return std::min(image_at_left, image_at_right) == 0.0 &&
         std::max(image_at_left, image_at_right) == 1.0;
}

void check_cylinder_guard(double beta, unsigned n) {
  if (!(n * std::log(std::fabs(beta)) < 700.0)) {
    fail(ErrorCode::Overflow, "cylinder order too large: n*log|beta| must stay below 700");
  }
}

void for_each_cylinder(const ExpandingMap& map, unsigned n,
                       const std::function<void(const CylinderView&)>& visit) {
  const Partition part(map.beta());
  require(n >= 1, ErrorCode::Precondition, "cylinder order must be >= 1");
  check_cylinder_guard(part.beta, n);

  std::vector<Frame> stack(n + 1);
  std::vector<std::uint32_t> word(n);
  stack[0] = {0.0, 1.0, 1.0, 0.0, 1.0, 0};
  unsigned depth = 0;
  for (;;) {
    Frame& f = stack[depth];
    if (f.next >= part.pieces) {
      if (depth == 0) return;
      --depth;
      continue;
    }
    // A reversing prefix visits the pieces right to left so output stays sorted.
    const unsigned step = f.next++;
    const unsigned k = f.slope > 0 ? step : part.pieces - 1 - step;
    const double lo = std::min(f.at_left, f.at_right);
    const double hi = std::max(f.at_left, f.at_right);
    const double y0 = std::max(lo, part.bounds[k]);
    const double y1 = std::min(hi, part.bounds[k + 1]);
    if (!(y1 > y0)) continue;

    const bool increasing = f.slope > 0;
    const double y_at_l = increasing ? y0 : y1;
    const double y_at_r = increasing ? y1 : y0;
    const double l = y_at_l == f.at_left ? f.left : f.left + (y_at_l - f.at_left) / f.slope;
    const double r = y_at_r == f.at_right ? f.right : f.left + (y_at_r - f.at_left) / f.slope;
    if (!(r > l)) continue;

    Frame child{l, r, f.slope * part.beta, part.snap(part.branch(k, y_at_l)),
                part.snap(part.branch(k, y_at_r)), 0};
    word[depth] = k;
    if (depth + 1 == n) {
      const CylinderView view{n, child.left, child.right, child.slope, child.at_left,
                              child.at_right, std::span<const std::uint32_t>(word)};
      visit(view);
    } else {
      stack[++depth] = child;
    }
  }
}

std::vector<Cylinder> cylinders(const ExpandingMap& map, unsigned n) {
  std::vector<Cylinder> out;
  for_each_cylinder(map, n, [&out](const CylinderView& v) {
    out.push_back({v.order, v.left, v.right, v.slope, v.intercept(),
                   std::vector<std::uint32_t>(v.word.begin(), v.word.end())});
  });
  return out;
}

std::size_t cylinder_count(const ExpandingMap& map, unsigned n) {
  std::size_t count = 0;
  for_each_cylinder(map, n, [&count](const CylinderView&) { ++count; });
  return count;
}

EntropyCheck entropy_count_check(const ExpandingMap& map, unsigned n, double epsilon) {
  require(epsilon > 0, ErrorCode::Precondition, "epsilon must be positive");
  EntropyCheck out;
  out.count = cylinder_count(map, n);
  out.bound = std::pow(std::fabs(map.beta()), n * (1.0 + epsilon));
  out.pass = static_cast<double>(out.count) <= out.bound;
  out.log_count_per_n = std::log(static_cast<double>(out.count)) / n;
  return out;
}

}  // namespace reclab
