// SPDX-License-Identifier: Apache-2.0
#include "reclab/measures.hpp"

#include <algorithm>
#include <cmath>

#include "reclab/error.hpp"
#include "reclab/parallel.hpp"

namespace reclab {
namespace {

constexpr double kOrbitSnap = 1e-12;

struct ParrySeries {
  std::vector<double> values;   // orbit of 1
  std::vector<double> weights;  // beta^-n
  double normaliser = 0.0;
};

ParrySeries parry_series(double beta, unsigned n_max) {
  require(std::isfinite(beta) && beta > 1.0, ErrorCode::Kind,
          "Parry density requires beta > 1; use an Ulam model for negative beta");
  require(n_max >= 1, ErrorCode::Precondition, "Parry truncation must be >= 1");
  ParrySeries s;
  double v = 1.0, w = 1.0;
  for (unsigned n = 0; n < n_max; ++n) {
    if (v <= kOrbitSnap) break;
    s.values.push_back(v);
    s.weights.push_back(w);
    v = frac_unit(beta * v);
    if (v > 1.0 - kOrbitSnap) v = 1.0;
    w /= beta;
  }
  NeumaierSum total;
  for (std::size_t n = 0; n < s.values.size(); ++n) total.add(s.weights[n] * s.values[n]);
  s.normaliser = total.value();
  return s;
}

const DensityModel& lebesgue_1d() {
  static const DensityModel model = DensityModel::lebesgue(1);
  return model;
}

// Value of branch k of the beta map at x, with x taken inside Q_k.
double branch_value(double beta, unsigned k, double x) {
  return beta > 0 ? beta * x - k : beta * x + k + 1;
}

}  // namespace

const char* to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::Lebesgue: return "lebesgue";
    case DensityKind::ParryBeta: return "parry";
    case DensityKind::Ulam: return "ulam";
    case DensityKind::Product: return "product";
  }
  return "?";
}

DensityModel DensityModel::lebesgue(unsigned dimension) {
  require(dimension >= 1, ErrorCode::Domain, "dimension must be >= 1");
  DensityModel m;
  m.kind_ = DensityKind::Lebesgue;
  m.dimension_ = dimension;
  m.density_sup = 1.0;
  return m;
}

DensityModel DensityModel::parry(double beta, unsigned n_max) {
  const ParrySeries s = parry_series(beta, n_max);
  DensityModel m;
  m.kind_ = DensityKind::ParryBeta;
  m.beta_ = beta;
  std::vector<double> knots{0.0, 1.0};
  knots.insert(knots.end(), s.values.begin(), s.values.end());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  m.knots_ = knots;
  m.knot_cdf_.resize(knots.size());
  for (std::size_t j = 0; j < knots.size(); ++j) {
    NeumaierSum acc;
    for (std::size_t n = 0; n < s.values.size(); ++n) {
      acc.add(s.weights[n] * std::min(knots[j], s.values[n]));
    }
    m.knot_cdf_[j] = acc.value() / s.normaliser;
  }
  m.knot_cdf_.back() = 1.0;
  double sup = 0.0;
  for (std::size_t n = 0; n < s.weights.size(); ++n) sup += s.weights[n];
  m.density_sup = sup / s.normaliser;
  return m;
}

DensityModel DensityModel::from_weights(std::vector<double> weights) {
  require(weights.size() >= 2, ErrorCode::Domain, "Ulam model needs at least 2 bins");
  NeumaierSum total;
  for (double w : weights) {
    require(w >= 0 && std::isfinite(w), ErrorCode::Domain, "weights must be non-negative");
    total.add(w);
  }
  require(std::fabs(total.value() - 1.0) < 1e-9, ErrorCode::Domain, "weights must sum to 1");
  DensityModel m;
  m.kind_ = DensityKind::Ulam;
  const std::size_t B = weights.size();
  m.knots_.resize(B + 1);
  m.knot_cdf_.resize(B + 1);
  NeumaierSum acc;
  double sup = 0.0;
  for (std::size_t i = 0; i <= B; ++i) {
    m.knots_[i] = static_cast<double>(i) / static_cast<double>(B);
    m.knot_cdf_[i] = std::min(acc.value() / total.value(), 1.0);
    if (i < B) {
      acc.add(weights[i]);
      sup = std::max(sup, weights[i] * static_cast<double>(B));
    }
  }
  m.knot_cdf_.back() = 1.0;
  m.weights_ = std::move(weights);
  m.density_sup = sup;
  return m;
}

DensityModel DensityModel::ulam(const ExpandingMap& map, unsigned bins, std::size_t max_iterations) {
  const double beta = map.beta();
  require(bins >= 2, ErrorCode::Precondition, "Ulam model needs at least 2 bins");
  const double abs_beta = std::fabs(beta);
  const auto pieces = static_cast<unsigned>(std::ceil(abs_beta));
  const double B = bins;

  // Sparse row-stochastic matrix, rows = source bins.
  std::vector<std::size_t> row_start{0};
  std::vector<std::uint32_t> cols;
  std::vector<double> probs;
  for (unsigned i = 0; i < bins; ++i) {
    const double e0 = i / B, e1 = (i + 1) / B;
    for (unsigned k = 0; k < pieces; ++k) {
      const double q0 = k / abs_beta, q1 = k + 1 < pieces ? (k + 1) / abs_beta : 1.0;
      const double x0 = std::max(e0, q0), x1 = std::min(e1, q1);
      if (!(x1 > x0)) continue;
      const double ya = std::clamp(branch_value(beta, k, x0), 0.0, 1.0);
      const double yb = std::clamp(branch_value(beta, k, x1), 0.0, 1.0);
      const double lo = std::min(ya, yb), hi = std::max(ya, yb);
      const auto j0 = static_cast<unsigned>(std::min(std::floor(lo * B), B - 1));
      const auto j1 = static_cast<unsigned>(std::min(std::ceil(hi * B), B));
      for (unsigned j = j0; j < j1; ++j) {
        const double overlap = std::min(hi, (j + 1) / B) - std::max(lo, j / B);
        if (overlap > 0) {
          cols.push_back(j);
          probs.push_back(overlap * B / abs_beta);
        }
      }
    }
    row_start.push_back(cols.size());
  }

  std::vector<double> w(bins, 1.0 / B), next(bins);
  std::size_t it = 0;
  double change = INFINITY;
  while (it < max_iterations) {
    std::fill(next.begin(), next.end(), 0.0);
    for (unsigned i = 0; i < bins; ++i) {
      const double wi = w[i];
      for (std::size_t e = row_start[i]; e < row_start[i + 1]; ++e) next[cols[e]] += wi * probs[e];
    }
    const double total = ordered_sum(next);
    change = 0.0;
    for (unsigned j = 0; j < bins; ++j) {
      next[j] /= total;
      change += std::fabs(next[j] - w[j]);
    }
    w.swap(next);
    ++it;
    if (change < 1e-12) break;
  }
  if (!(change < 1e-12)) {
    fail(ErrorCode::Convergence,
         "Ulam power iteration did not converge; residual " + std::to_string(change));
  }
  DensityModel m = from_weights(std::move(w));
  m.beta_ = beta;
  m.iterations_ = it;
  return m;
}

DensityModel DensityModel::product(std::vector<DensityModel> factors) {
  require(!factors.empty(), ErrorCode::Domain, "product density needs factors");
  DensityModel m;
  m.kind_ = DensityKind::Product;
  m.dimension_ = 0;
  double sup = 1.0;
  bool sup_known = true;
  for (auto& f : factors) {
    require(f.dimension() == 1, ErrorCode::Domain, "product factors must be 1-d models");
    if (f.density_sup) sup *= *f.density_sup; else sup_known = false;
    m.factors_.push_back(std::make_shared<const DensityModel>(std::move(f)));
    ++m.dimension_;
  }
  if (sup_known) m.density_sup = sup;
  return m;
}

const DensityModel& DensityModel::factor(unsigned i) const {
  if (kind_ == DensityKind::Lebesgue) return lebesgue_1d();
  require(i < dimension_, ErrorCode::Range, "factor index out of range");
  if (kind_ == DensityKind::Product) return *factors_[i];
  return *this;
}

double DensityModel::cdf(double x) const {
  require(dimension_ == 1 && kind_ != DensityKind::Product, ErrorCode::Kind,
          "cdf requires a 1-d model");
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  if (kind_ == DensityKind::Lebesgue) return x;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double span = knots_[j + 1] - knots_[j];
  const double frac = (x - knots_[j]) / span;
  return knot_cdf_[j] + frac * (knot_cdf_[j + 1] - knot_cdf_[j]);
}

double DensityModel::density(double x) const {
  require(dimension_ == 1 && kind_ != DensityKind::Product, ErrorCode::Kind,
          "density requires a 1-d model");
  require(x >= 0 && x < 1, ErrorCode::Domain, "x must lie in [0,1)");
  if (kind_ == DensityKind::Lebesgue) return 1.0;
  if (kind_ == DensityKind::Ulam) {
    const auto bin = std::min<std::size_t>(static_cast<std::size_t>(x * weights_.size()),
                                           weights_.size() - 1);
    return weights_[bin] * static_cast<double>(weights_.size());
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return (knot_cdf_[j + 1] - knot_cdf_[j]) / (knots_[j + 1] - knots_[j]);
}

double DensityModel::inverse_cdf(double u) const {
  require(dimension_ == 1 && kind_ != DensityKind::Product, ErrorCode::Kind,
          "inverse cdf requires a 1-d model");
  u = std::clamp(u, 0.0, 1.0);
  if (kind_ == DensityKind::Lebesgue) return std::min(u, std::nextafter(1.0, 0.0));
  auto it = std::upper_bound(knot_cdf_.begin(), knot_cdf_.end(), u);
  std::size_t j = static_cast<std::size_t>(it - knot_cdf_.begin());
  j = j == 0 ? 0 : j - 1;
  if (j + 1 >= knots_.size()) return std::nextafter(1.0, 0.0);
  const double mass = knot_cdf_[j + 1] - knot_cdf_[j];
  double x = knots_[j];
  if (mass > 0) x += (u - knot_cdf_[j]) / mass * (knots_[j + 1] - knots_[j]);
  return std::clamp(x, 0.0, std::nextafter(1.0, 0.0));
}

double DensityModel::lq_integral(double q, unsigned grid) const {
  require(q >= 1 && grid >= 1, ErrorCode::Precondition, "lq integral needs q >= 1");
  NeumaierSum acc;
  for (unsigned j = 0; j < grid; ++j) acc.add(std::pow(density((j + 0.5) / grid), q));
  return acc.value() / grid;
}

double parry_density(double beta, double x, unsigned n_max) {
  require(x >= 0 && x < 1, ErrorCode::Domain, "x must lie in [0,1)");
  const ParrySeries s = parry_series(beta, n_max);
  NeumaierSum acc;
  for (std::size_t n = 0; n < s.values.size(); ++n) {
    if (x < s.values[n]) acc.add(s.weights[n]);
  }
  return acc.value() / s.normaliser;
}

double interval_measure(const DensityModel& density, double a, double b) {
  a = std::max(a, 0.0);
  b = std::min(b, 1.0);
  if (!(b > a)) return 0.0;
  if (density.kind() == DensityKind::Lebesgue) return b - a;
  return density.cdf(b) - density.cdf(a);
}

double measure_of_rect(const DensityModel& density, const Target& rect, bool clip) {
  require(rect.kind == TargetKind::Rect, ErrorCode::Kind, "measure_of_rect needs a rectangle");
  const std::size_t d = rect.center.size();
  if (density.kind() != DensityKind::Lebesgue) {
    require(d == density.dimension(), ErrorCode::Domain, "rectangle/density dimension mismatch");
  }
  if (!clip && density.kind() == DensityKind::Lebesgue) return rect_volume(rect.radii);
  double m = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    const DensityModel& f =
        density.kind() == DensityKind::Lebesgue ? lebesgue_1d() : density.factor(static_cast<unsigned>(i));
    m *= interval_measure(f, rect.center[i] - rect.radii[i], rect.center[i] + rect.radii[i]);
  }
  return m;
}

ScaleResult scale_to_measure(const DensityModel& density, const Point& x,
                             const std::vector<double>& r_n) {
  require(x.size() == r_n.size(), ErrorCode::Precondition, "radii must match dimension");
  double target = 1.0;
  for (double r : r_n) {
    require(r > 0, ErrorCode::Precondition, "scale_to_measure needs positive radii");
    target *= r;
  }
  require(target <= 1.0, ErrorCode::Precondition, "target measure must be <= 1");

  auto measure_at = [&](double l) {
    Target t;
    t.kind = TargetKind::Rect;
    t.center = x;
    t.radii.resize(r_n.size());
    for (std::size_t i = 0; i < r_n.size(); ++i) t.radii[i] = l * r_n[i];
    return measure_of_rect(density, t, true);
  };

  ScaleResult out;
  double lo = 0.0, hi = 1.0;
  for (int k = 0; measure_at(hi) < target; ++k) {
    const double smallest = *std::min_element(r_n.begin(), r_n.end());
    if (hi * smallest > 2.0 || k > 2000) {
      fail(ErrorCode::Infeasible, "target measure exceeds the mass of the domain");
    }
    lo = hi;
    hi *= 2.0;
  }
  double mid = hi;
  double residual = std::fabs(measure_at(hi) - target);
  unsigned it = 0;
  while (residual >= 1e-10) {
    if (it >= 200) {
      fail(ErrorCode::Convergence, "scale_to_measure bisection did not converge");
    }
    mid = 0.5 * (lo + hi);
    const double m = measure_at(mid);
    residual = std::fabs(m - target);
    if (m < target) lo = mid; else hi = mid;
    ++it;
  }
  out.l = mid;
  out.residual = residual;
  out.iterations = it;
  out.xi.resize(r_n.size());
  for (std::size_t i = 0; i < r_n.size(); ++i) out.xi[i] = mid * r_n[i];
  return out;
}

double invariance_residual(const ExpandingMap& map, const DensityModel& density, Interval interval) {
  NeumaierSum pre;
  for (const auto& piece : preimage_intervals(map, interval)) {
    pre.add(interval_measure(density, piece.left, piece.right));
  }
  return std::fabs(pre.value() - interval_measure(density, interval.left, interval.right));
}

}  // namespace reclab
