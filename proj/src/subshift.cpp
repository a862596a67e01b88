// SPDX-License-Identifier: Apache-2.0
#include "reclab/subshift.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reclab/error.hpp"

namespace reclab {
namespace {

void require_positive_beta(const ExpandingMap& map) {
  require(map.kind() == MapKind::Beta, ErrorCode::Kind, "subshifts require a beta map");
  require(map.beta() > 1, ErrorCode::Domain, "subshift construction requires beta > 1");
}

// Branch tree used for measure queries. Integer beta uses single digits,
// which generate the same attractor and measure as any block length.
struct Tree {
  double length;
  std::uint64_t count;
  const std::vector<double>* lefts;

  double left(std::uint64_t j) const {
    return lefts ? (*lefts)[j] : static_cast<double>(j) * length;
  }
  // Index of the last branch with left <= x, or count when none.
  std::uint64_t last_at_or_below(double x) const {
    std::uint64_t lo = 0, hi = count;
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (left(mid) <= x) lo = mid + 1; else hi = mid;
    }
    return lo == 0 ? count : lo - 1;
  }
  // Index of the first branch with left >= x.
  std::uint64_t first_at_or_above(double x) const {
    std::uint64_t lo = 0, hi = count;
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (left(mid) < x) lo = mid + 1; else hi = mid;
    }
    return lo;
  }
};

Tree make_tree(const FullSubshift& sub) {
  if (sub.integer_beta) {
    return {1.0 / sub.beta, static_cast<std::uint64_t>(sub.beta), nullptr};
  }
  return {sub.branch_length(), sub.lefts.size(), &sub.lefts};
}

double tree_measure(const Tree& tree, double a, double b, unsigned depth) {
  a = std::max(a, 0.0);
  b = std::min(b, 1.0);
  if (b <= a) return 0.0;
  if (a <= 0.0 && b >= 1.0) return 1.0;
  if (depth == 0) return b - a;
  const double weight = 1.0 / static_cast<double>(tree.count);
  const double L = tree.length;

  // Branches [l, l+L) with a <= l and l + L <= b.
  const std::uint64_t first = tree.first_at_or_above(a);
  const std::uint64_t last_fit = tree.last_at_or_below(b - L);
  double total = 0.0;
  if (first < tree.count && last_fit != tree.count && last_fit >= first) {
    total += static_cast<double>(last_fit - first + 1) * weight;
  }
  auto partial = [&](std::uint64_t j) {
    const double l = tree.left(j);
    if (l >= a && l + L <= b) return 0.0;
    if (l + L <= a || l >= b) return 0.0;
    return weight * tree_measure(tree, (a - l) / L, (b - l) / L, depth - 1);
  };
  const std::uint64_t ja = tree.last_at_or_below(a);
  const std::uint64_t jb = tree.last_at_or_below(b);
  if (ja != tree.count) total += partial(ja);
  if (jb != tree.count && jb != ja) total += partial(jb);
  return std::min(total, 1.0);
}

}  // namespace

std::vector<Cylinder> full_cylinders(const ExpandingMap& map, unsigned m) {
  std::vector<Cylinder> out;
  for_each_cylinder(map, m, [&out](const CylinderView& c) {
    if (!c.full()) return;
    out.push_back({c.order, c.left, c.right, c.slope, c.intercept(),
                   std::vector<std::uint32_t>(c.word.begin(), c.word.end())});
  });
  return out;
}

double FullSubshift::branch_length() const { return std::pow(beta, -static_cast<double>(m)); }

std::vector<Interval> FullSubshift::branches() const {
  std::vector<Interval> out;
  const double L = branch_length();
  if (integer_beta) {
    require(branch_count <= double(1 << 24), ErrorCode::Overflow,
            "too many branches to list");
    const auto n = static_cast<std::uint64_t>(branch_count);
    for (std::uint64_t j = 0; j < n; ++j) {
      out.push_back({static_cast<double>(j) * L, static_cast<double>(j + 1) * L});
    }
    return out;
  }
  for (double l : lefts) out.push_back({l, l + L});
  return out;
}

unsigned initial_block_length(double beta, double epsilon) {
  require(epsilon > 0 && epsilon < 1, ErrorCode::Domain, "epsilon must lie in (0,1)");
  require(beta > 1, ErrorCode::Domain, "subshift construction requires beta > 1");
  const double bound = (1.0 + std::log(8.0)) / (epsilon * std::log(beta));
  return static_cast<unsigned>(std::floor(bound)) + 1;
}

FullSubshift build_full_subshift(const ExpandingMap& map, double epsilon,
                                 std::uint64_t leaf_guard) {
  require_positive_beta(map);
  const double beta = map.beta();
  FullSubshift sub;
  sub.beta = beta;
  sub.epsilon = epsilon;
  sub.m = initial_block_length(beta, epsilon);
  check_cylinder_guard(beta, sub.m);

  if (beta == std::nearbyint(beta)) {
    sub.integer_beta = true;
    sub.branch_count = std::pow(beta, static_cast<double>(sub.m));
    sub.delta = 1.0;
    return sub;
  }

  double best = 0.0;
  unsigned best_m = sub.m;
  for (unsigned m = sub.m;; ++m) {
    // Cylinder counts of a beta-shift are at most beta^(m+1)/(beta-1).
    const double estimate = std::pow(beta, m + 1.0) / (beta - 1.0);
    if (estimate > static_cast<double>(leaf_guard)) break;
    check_cylinder_guard(beta, m);
    std::vector<double> lefts;
    for_each_cylinder(map, m, [&lefts](const CylinderView& c) {
      if (c.full()) lefts.push_back(c.left);
    });
    const double delta = std::log(static_cast<double>(lefts.size())) /
                         (static_cast<double>(m) * std::log(beta));
    if (delta > best) {
      best = delta;
      best_m = m;
    }
    if (delta >= 1.0 - epsilon && delta > 0.0) {
      sub.m = m;
      sub.branch_count = static_cast<double>(lefts.size());
      sub.delta = delta;
      sub.lefts = std::move(lefts);
      return sub;
    }
  }
  std::ostringstream msg;
  msg << "enumeration guard reached before delta >= " << 1.0 - epsilon << "; best delta "
      << best << " at m=" << best_m;
  fail(ErrorCode::Construction, msg.str());
}

double subshift_measure(const FullSubshift& sub, double a, double b, unsigned depth) {
  return tree_measure(make_tree(sub), a, b, depth);
}

double sample_attractor_point(const FullSubshift& sub, PointStream& stream) {
  const Tree tree = make_tree(sub);
  // Enough digits that the remaining scale is below double resolution.
  const unsigned digits =
      static_cast<unsigned>(std::ceil(60.0 * std::log(2.0) / -std::log(tree.length)));
  std::vector<std::uint64_t> word(digits);
  for (auto& j : word) j = stream.next_below(tree.count);
  double x = 0.0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) x = tree.left(*it) + tree.length * x;
  return std::min(x, std::nextafter(1.0, 0.0));
}

AhlforsResult ahlfors_check(const FullSubshift& sub, const std::vector<double>& radii,
                            std::size_t samples, std::uint64_t seed) {
  require(sub.delta > 0 && sub.delta <= 1, ErrorCode::Precondition, "subshift needs 0 < delta <= 1");
  require(!radii.empty() && samples > 0, ErrorCode::Precondition, "need radii and samples");
  for (double r : radii) {
    require(r > 0 && r < 0.5, ErrorCode::Precondition, "radii must lie in (0, 1/2)");
  }
  const Tree tree = make_tree(sub);
  AhlforsResult out;
  out.a = INFINITY;
  out.b = 0.0;
  std::vector<double> points(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    PointStream stream(seed, StreamPurpose::Sample, k);
    points[k] = sample_attractor_point(sub, stream);
  }
  for (double r : radii) {
    const unsigned depth =
        static_cast<unsigned>(std::ceil(std::log(r) / std::log(tree.length))) + 2;
    AhlforsRow row{r, INFINITY, 0.0};
    const double scale = std::pow(r, sub.delta);
    for (double x : points) {
      const double q = tree_measure(tree, x - r, x + r, depth) / scale;
      row.min_ratio = std::min(row.min_ratio, q);
      row.max_ratio = std::max(row.max_ratio, q);
    }
    out.a = std::min(out.a, row.min_ratio);
    out.b = std::max(out.b, row.max_ratio);
    out.rows.push_back(row);
  }
  out.ratio = out.b / out.a;
  out.pass = out.a > 0 && out.ratio <= 1e3;
  return out;
}

double reference_subsystem_bound(double beta) {
  require(std::fabs(beta) > 1, ErrorCode::Domain, "expansion requires |beta|>1");
  return 1.0 - std::log(8.0) / std::log(std::fabs(beta));
}

MtpBound mtp_dimension_bound(const std::vector<FullSubshift>& subshifts,
                             const std::vector<double>& t) {
  require(!subshifts.empty(), ErrorCode::Precondition, "need one subshift per coordinate");
  std::vector<double> betas, deltas;
  for (const auto& s : subshifts) {
    require(s.epsilon == subshifts.front().epsilon, ErrorCode::Precondition,
            "subshifts must share a common epsilon");
    betas.push_back(s.beta);
    deltas.push_back(s.delta);
  }
  return mtp_lower_bound(betas, deltas, t, subshifts.front().epsilon);
}

}  // namespace reclab
