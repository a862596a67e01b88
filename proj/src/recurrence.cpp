// SPDX-License-Identifier: Apache-2.0
#include "reclab/recurrence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "reclab/error.hpp"
#include "reclab/orbit.hpp"
#include "reclab/parallel.hpp"
#include "reclab/simd/kernels.hpp"

namespace reclab {
namespace {

constexpr std::size_t kPointChunk = 512;

double sample_coordinate(const DensityModel& f, double u) { return f.inverse_cdf(u); }

// Uniform-in-mass draw from the density restricted to [a, b) in one coordinate.
double sample_restricted(const DensityModel& f, double a, double b, double u) {
  a = std::max(a, 0.0);
  b = std::min(b, 1.0);
  const double ca = f.kind() == DensityKind::Lebesgue ? a : f.cdf(a);
  const double cb = f.kind() == DensityKind::Lebesgue ? b : f.cdf(b);
  double x = f.inverse_cdf(ca + u * (cb - ca));
  return std::clamp(x, a, std::nextafter(b, a));
}

bool exact_order_affordable(const ExpandingMap& map, unsigned n) {
  for (double b : map.betas()) {
    if (n * std::log2(std::fabs(b)) > 22.0) return false;
  }
  return true;
}

}  // namespace

const char* to_string(SandwichMode mode) {
  switch (mode) {
    case SandwichMode::Rect: return "rect";
    case SandwichMode::Scaled: return "scaled";
    case SandwichMode::Hyperboloid: return "hyperboloid";
  }
  return "?";
}

bool hit(const ExpandingMap& map, const Point& x, std::size_t n, const RadiiSchedule& schedule,
         TargetKind target) {
  require(n >= 1, ErrorCode::Precondition, "hit needs n >= 1");
  Point y = x;
  require(in_unit_cube(y) && y.size() == map.dimension(), ErrorCode::Domain,
          "point must lie in [0,1)^d");
  for (std::size_t k = 0; k < n; ++k) y = reclab::apply(map, y);
  if (target == TargetKind::Rect) {
    require(schedule.dimension() == map.dimension(), ErrorCode::Domain,
            "schedule dimension must match the map");
    return contains(Target::rect(x, schedule.radii(n)), y);
  }
  return contains(Target::hyperboloid(x, schedule.radius(n, 0)), y);
}

void for_each_recurrence_interval(
    const ExpandingMap& map, unsigned n, double r,
    const std::function<void(const CylinderView&, Interval)>& visit) {
  require(r >= 0, ErrorCode::Domain, "radius must be >= 0");
  for_each_cylinder(map, n, [&](const CylinderView& c) {
    const double s1 = c.slope - 1.0;
    const double centre = c.left + (c.left - c.image_at_left) / s1;
    const double half = r / std::fabs(s1);
    const double lo = std::max(c.left, centre - half);
    const double hi = std::min(c.right, centre + half);
    visit(c, hi > lo ? Interval{lo, hi} : Interval{lo, lo});
  });
}

double exact_En_measure(const ExpandingMap& map, unsigned n, const std::vector<double>& r) {
  require(map.kind() != MapKind::IntegerMatrix, ErrorCode::Kind,
          "exact E_n measure is available for beta and diagonal maps only");
  require(r.size() == map.dimension(), ErrorCode::Domain, "radii must match the map dimension");
  double product = 1.0;
  for (unsigned i = 0; i < map.dimension(); ++i) {
    const ExpandingMap coord = map.coordinate(i);
    NeumaierSum total;
    if (r[i] > 0) {
      for_each_recurrence_interval(coord, n, r[i],
                                   [&total](const CylinderView&, Interval in) { total.add(in.length()); });
    }
    product *= total.value();
  }
  return product;
}

Point sample_point(const DensityModel& density, unsigned d, PointStream& stream) {
  Point x(d);
  for (unsigned i = 0; i < d; ++i) {
    const DensityModel& f = density.factor(i);
    x[i] = f.kind() == DensityKind::Lebesgue ? stream.next_unit() : sample_coordinate(f, stream.next_unit());
  }
  return x;
}

DichotomyReport run_dichotomy(const ExpandingMap& map, const RadiiSchedule& schedule,
                              const DensityModel& density, const DichotomyOptions& opt) {
  const unsigned d = map.dimension();
  const std::size_t M = opt.samples, N = opt.horizon;
  if (!opt.allow_small) {
    require(M >= 1000, ErrorCode::Precondition, "dichotomy needs at least 1e3 sample points");
    require(N >= 100, ErrorCode::Precondition, "dichotomy needs a horizon of at least 1e2");
  }
  require(M >= 1 && N >= 1, ErrorCode::Precondition, "empty experiment");
  if (density.kind() != DensityKind::Lebesgue) {
    require(density.dimension() == d, ErrorCode::Domain, "density dimension must match the map");
  }
  if (opt.target == TargetKind::Rect) {
    require(schedule.dimension() == d, ErrorCode::Domain, "schedule dimension must match the map");
  } else {
    require(schedule.dimension() == 1, ErrorCode::Domain, "hyperboloid schedules are scalar");
  }
  if (auto len = schedule.length()) {
    require(*len >= N, ErrorCode::Range, "table schedule shorter than the horizon");
  }

  // Radii per step, shared by all chunks.
  const unsigned width = opt.target == TargetKind::Rect ? d : 1;
  std::vector<double> radii(N * width);
  for (std::size_t n = 1; n <= N; ++n) {
    schedule.radii(n, std::span<double>(radii.data() + (n - 1) * width, width));
  }

  std::size_t windows = 0;
  while ((std::size_t{1} << windows) <= N) ++windows;
  const std::size_t half_begin = std::max<std::size_t>(1, N / 2);

  const std::size_t chunks = chunk_count(M, kPointChunk);
  std::vector<std::vector<std::uint64_t>> per_n(chunks);
  std::vector<std::uint32_t> hits(M, 0);
  std::vector<std::uint64_t> window_flags(M, 0);
  std::vector<std::uint8_t> half_flags(M, 0);

  parallel_chunks(M, kPointChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    const std::size_t P = end - begin;
    const auto& kern = simd::active_kernels();
    OrbitBatch batch(map, opt.seed, begin, P);
    for (std::size_t p = 0; p < P; ++p) {
      PointStream stream(opt.seed, StreamPurpose::Sample, begin + p);
      batch.set_point(p, sample_point(density, d, stream));
    }
    auto& counts = per_n[c];
    counts.assign(N, 0);
    std::vector<std::uint8_t> mask(P);
    std::vector<double> rvec(P), prod(P);
    std::uint32_t* point_hits = hits.data() + begin;
    std::size_t window = 0;
    for (std::size_t n = 1; n <= N; ++n) {
      if ((std::size_t{1} << (window + 1)) <= n) ++window;
      batch.step();
      std::fill(mask.begin(), mask.end(), 1);
      const double* r = radii.data() + (n - 1) * width;
      if (opt.target == TargetKind::Rect) {
        for (unsigned i = 0; i < d; ++i) {
          std::fill(rvec.begin(), rvec.end(), r[i]);
          kern.abs_diff_less(batch.coordinate(i), batch.initial(i), rvec.data(), mask.data(), P);
        }
      } else {
        std::fill(prod.begin(), prod.end(), 1.0);
        for (unsigned i = 0; i < d; ++i) {
          kern.abs_diff_mul(batch.coordinate(i), batch.initial(i), prod.data(), P);
        }
        kern.less_than(prod.data(), r[0], mask.data(), P);
      }
      const std::uint64_t hit_count = kern.accumulate_mask(mask.data(), point_hits, P);
      counts[n - 1] = hit_count;
      if (hit_count == 0) continue;
      for (std::size_t p = 0; p < P; ++p) {
        if (!mask[p]) continue;
        window_flags[begin + p] |= std::uint64_t{1} << window;
        if (n >= half_begin) half_flags[begin + p] = 1;
      }
    }
  });

  DichotomyReport rep;
  rep.classification = classify_series(schedule, opt.target, d, N);
  rep.governing_partial_sum = rep.classification.partial_sums.back();
  const double Md = static_cast<double>(M);
  rep.rows.resize(N);
  for (std::size_t n = 1; n <= N; ++n) {
    std::uint64_t total = 0;
    for (const auto& counts : per_n) total += counts[n - 1];
    SeriesRow& row = rep.rows[n - 1];
    row.n = n;
    const double p = static_cast<double>(total) / Md;
    row.mc_estimate = p;
    row.mc_stderr = std::sqrt(p * (1.0 - p) / Md);
    row.partial_sum = rep.classification.partial_sums[n - 1];
    if (opt.target == TargetKind::Rect && map.kind() != MapKind::IntegerMatrix &&
        n <= opt.exact_max_order && exact_order_affordable(map, static_cast<unsigned>(n))) {
      row.exact = exact_En_measure(map, static_cast<unsigned>(n),
                                   std::vector<double>(radii.begin() + (n - 1) * width,
                                                       radii.begin() + n * width));
    }
  }

  NeumaierSum sum, sum_sq;
  for (std::uint32_t h : hits) {
    sum.add(h);
    sum_sq.add(static_cast<double>(h) * h);
  }
  rep.mean_total_hits = sum.value() / Md;
  const double var = std::max(0.0, sum_sq.value() / Md - rep.mean_total_hits * rep.mean_total_hits);
  rep.mean_total_hits_stderr = std::sqrt(var / Md);

  for (std::size_t k = 0; k < windows; ++k) {
    TailWindow w;
    w.begin = std::size_t{1} << k;
    w.end = std::min(2 * w.begin - 1, N);
    w.complete = 2 * w.begin - 1 <= N;
    std::size_t count = 0;
    for (std::uint64_t flags : window_flags) count += (flags >> k) & 1;
    w.hit_fraction = static_cast<double>(count) / Md;
    rep.windows.push_back(w);
  }
  std::size_t half = 0;
  for (std::uint8_t f : half_flags) half += f;
  rep.half_window_fraction = static_cast<double>(half) / Md;
  rep.hits_per_point = std::move(hits);
  return rep;
}

MixingReport mixing_decay_estimate(const ExpandingMap& map, const Target& F, const Target& G,
                                   std::size_t n_min, std::size_t n_max, std::size_t samples,
                                   std::uint64_t seed, const DensityModel& density) {
  const unsigned d = map.dimension();
  require(F.kind == TargetKind::Rect && G.kind == TargetKind::Rect, ErrorCode::Kind,
          "mixing sets must be rectangles");
  require(F.center.size() == d && G.center.size() == d, ErrorCode::Domain,
          "mixing sets must match the map dimension");
  for (double r : F.radii) require(r > 0, ErrorCode::Precondition, "F must have positive radii");
  for (double r : G.radii) require(r > 0, ErrorCode::Precondition, "G must have positive radii");
  require(n_min >= 1 && n_max >= n_min, ErrorCode::Precondition, "invalid n range");
  require(samples >= 2, ErrorCode::Precondition, "need at least two samples");

  const std::size_t chunks = chunk_count(samples, kPointChunk);
  // Per chunk: [n_f, then per n: n_g, n_fg].
  std::vector<std::vector<std::uint64_t>> part(chunks);
  parallel_chunks(samples, kPointChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    const std::size_t P = end - begin;
    const auto& kern = simd::active_kernels();
    OrbitBatch batch(map, seed, begin, P);
    std::vector<std::uint8_t> f(P, 1), g(P);
    std::vector<double> col(P), centre(P), rad(P);
    for (std::size_t p = 0; p < P; ++p) {
      PointStream stream(seed, StreamPurpose::Sample, begin + p);
      batch.set_point(p, sample_point(density, d, stream));
    }
    for (unsigned i = 0; i < d; ++i) {
      std::fill(centre.begin(), centre.end(), F.center[i]);
      std::fill(rad.begin(), rad.end(), F.radii[i]);
      kern.abs_diff_less(batch.initial(i), centre.data(), rad.data(), f.data(), P);
    }
    auto& out = part[c];
    out.assign(1 + 2 * (n_max - n_min + 1), 0);
    for (std::size_t p = 0; p < P; ++p) out[0] += f[p];
    for (std::size_t n = 1; n <= n_max; ++n) {
      batch.step();
      if (n < n_min) continue;
      std::fill(g.begin(), g.end(), 1);
      for (unsigned i = 0; i < d; ++i) {
        std::fill(centre.begin(), centre.end(), G.center[i]);
        std::fill(rad.begin(), rad.end(), G.radii[i]);
        kern.abs_diff_less(batch.coordinate(i), centre.data(), rad.data(), g.data(), P);
      }
      std::uint64_t ng = 0, nfg = 0;
      for (std::size_t p = 0; p < P; ++p) {
        ng += g[p];
        nfg += g[p] & f[p];
      }
      out[1 + 2 * (n - n_min)] = ng;
      out[2 + 2 * (n - n_min)] = nfg;
    }
  });

  const double M = static_cast<double>(samples);
  std::vector<std::uint64_t> total(1 + 2 * (n_max - n_min + 1), 0);
  for (const auto& p : part) {
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += p[k];
  }
  MixingReport rep;
  const double nf = static_cast<double>(total[0]);
  const double fbar = nf / M;
  rep.mu_F = fbar;
  double g_sum = 0.0;
  std::vector<double> xs, ys;
  for (std::size_t n = n_min; n <= n_max; ++n) {
    const double ng = static_cast<double>(total[1 + 2 * (n - n_min)]);
    const double nfg = static_cast<double>(total[2 + 2 * (n - n_min)]);
    const double gbar = ng / M;
    g_sum += gbar;
    const double cov = nfg / M - fbar * gbar;
    // The centred product takes four values; weight them by their counts.
    const double counts[4] = {nfg, nf - nfg, ng - nfg, M - nf - ng + nfg};
    const double values[4] = {(1 - fbar) * (1 - gbar), (1 - fbar) * (-gbar), (-fbar) * (1 - gbar),
                              fbar * gbar};
    double var = 0.0;
    for (int k = 0; k < 4; ++k) var += counts[k] * (values[k] - cov) * (values[k] - cov);
    var /= (M - 1.0);
    MixingRow row;
    row.n = n;
    row.covariance = cov;
    row.correlation = std::fabs(cov);
    row.stderr_ = std::sqrt(var / M);
    row.above_floor = row.correlation > rep.noise_sigmas * row.stderr_;
    if (row.above_floor) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(row.correlation));
    }
    rep.rows.push_back(row);
  }
  rep.mu_G = g_sum / static_cast<double>(n_max - n_min + 1);

  rep.fit.points = xs.size();
  if (xs.size() >= 2) {
    const double k = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      sx += xs[j];
      sy += ys[j];
      sxx += xs[j] * xs[j];
      sxy += xs[j] * ys[j];
    }
    const double denom = k * sxx - sx * sx;
    const double slope = (k * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / k;
    rep.fit.available = true;
    rep.fit.tau = -slope;
    rep.fit.c = std::exp(intercept) / (rep.mu_G > 0 ? rep.mu_G : 1.0);
  } else {
    rep.fit.note = "fewer than two estimates above the noise floor; fit unavailable";
  }
  return rep;
}

SandwichResult sandwich_check(const ExpandingMap& map, const DensityModel& density,
                              const SandwichOptions& opt) {
  const unsigned d = map.dimension();
  require(opt.x0.size() == d && opt.rho.size() == d, ErrorCode::Precondition,
          "x0 and rho must match the map dimension");
  require(in_unit_cube(opt.x0), ErrorCode::Domain, "x0 must lie in [0,1)^d");
  require(opt.n >= 1, ErrorCode::Precondition, "n must be >= 1");
  const bool hyper = opt.mode == SandwichMode::Hyperboloid;
  require(opt.r_n.size() == (hyper ? 1u : d), ErrorCode::Precondition, "r_n has the wrong size");
  for (unsigned i = 0; i < d; ++i) {
    require(opt.rho[i] > 0, ErrorCode::Precondition, "rho must be positive");
    const double bound = hyper ? opt.r_n[0] : opt.r_n[i];
    require(opt.rho[i] < bound, ErrorCode::Precondition, "sandwich requires rho < r_n");
  }

  // Inner and outer targets around x0.
  std::vector<double> inner(d), outer(d);
  double inner_delta = 0, outer_delta = 0;
  std::optional<ScaleResult> base;
  const double rho_max = *std::max_element(opt.rho.begin(), opt.rho.end());
  if (opt.mode == SandwichMode::Rect) {
    for (unsigned i = 0; i < d; ++i) {
      inner[i] = opt.r_n[i] - opt.rho[i];
      outer[i] = opt.r_n[i] + opt.rho[i];
    }
  } else if (opt.mode == SandwichMode::Scaled) {
    base = scale_to_measure(density, opt.x0, opt.r_n);
    double t = 0;
    for (unsigned i = 0; i < d; ++i) t = std::max(t, opt.rho[i] / opt.r_n[i]);
    for (unsigned i = 0; i < d; ++i) {
      inner[i] = std::max(0.0, base->xi[i] - 2 * t * opt.r_n[i]);
      outer[i] = base->xi[i] + 2 * t * opt.r_n[i];
    }
  } else {
    const double widen = std::ldexp(rho_max, static_cast<int>(d));
    inner_delta = opt.r_n[0] - widen;
    outer_delta = opt.r_n[0] + widen;
  }

  SandwichResult res;
  PointStream stream(opt.seed, StreamPurpose::Probe, 0);
  Point z(d);
  for (std::size_t k = 0; k < opt.probes; ++k) {
    for (unsigned i = 0; i < d; ++i) {
      const double half = hyper ? rho_max : opt.rho[i];
      const double lo = std::max(0.0, opt.x0[i] - half);
      const double hi = std::min(1.0, opt.x0[i] + half);
      z[i] = std::min(lo + (hi - lo) * stream.next_unit(), std::nextafter(1.0, 0.0));
    }
    bool in_block = true;
    for (unsigned i = 0; i < d; ++i) {
      in_block = in_block && std::fabs(z[i] - opt.x0[i]) < (hyper ? rho_max : opt.rho[i]);
    }
    if (!in_block) continue;
    ++res.probes;
    Point y = z;
    for (std::size_t s = 0; s < opt.n; ++s) y = reclab::apply(map, y);

    bool in_inner, in_event, in_outer;
    if (opt.mode == SandwichMode::Rect) {
      in_inner = contains(Target::rect(opt.x0, inner), y);
      in_event = contains(Target::rect(z, opt.r_n), y);
      in_outer = contains(Target::rect(opt.x0, outer), y);
    } else if (opt.mode == SandwichMode::Scaled) {
      const ScaleResult local = scale_to_measure(density, z, opt.r_n);
      in_inner = contains(Target::rect(opt.x0, inner), y);
      in_event = contains(Target::rect(z, local.xi), y);
      in_outer = contains(Target::rect(opt.x0, outer), y);
    } else {
      in_inner = inner_delta > 0 && contains(Target::hyperboloid(opt.x0, inner_delta), y);
      in_event = contains(Target::hyperboloid(z, opt.r_n[0]), y);
      in_outer = contains(Target::hyperboloid(opt.x0, outer_delta), y);
    }
    res.inner += in_inner;
    res.event += in_event;
    res.outer += in_outer;
    if (res.pass && in_inner && !in_event) {
      res.pass = false;
      res.witness = z;
      res.violated = "inner inclusion";
    }
    if (res.pass && in_event && !in_outer) {
      res.pass = false;
      res.witness = z;
      res.violated = "outer inclusion";
    }
  }
  return res;
}

ScaledReport scaled_set_measure_check(const ExpandingMap& map, const DensityModel& density,
                                      const RadiiSchedule& schedule, const Target& ball,
                                      std::size_t n_min, std::size_t n_max, std::size_t samples,
                                      std::uint64_t seed) {
  const unsigned d = map.dimension();
  require(ball.kind == TargetKind::Rect && ball.center.size() == d, ErrorCode::Domain,
          "ball must be a rectangle in the map's dimension");
  require(schedule.dimension() == d, ErrorCode::Domain, "schedule dimension must match the map");
  require(n_min >= 1 && n_max >= n_min, ErrorCode::Precondition, "invalid n range");
  for (std::size_t n = n_min; n <= n_max; ++n) {
    for (unsigned i = 0; i < d; ++i) {
      require(schedule.radius(n, i) > 0, ErrorCode::Precondition,
              "scaled sets need r_n > 0 on the whole range");
    }
  }
  ScaledReport rep;
  rep.mu_B = measure_of_rect(density, ball, true);
  require(rep.mu_B > 0, ErrorCode::Precondition, "ball has zero measure");

  const std::size_t span = n_max - n_min + 1;
  const std::size_t chunks = chunk_count(samples, kPointChunk);
  std::vector<std::vector<std::uint64_t>> part(chunks);
  parallel_chunks(samples, kPointChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    const std::size_t P = end - begin;
    OrbitBatch batch(map, seed, begin, P);
    std::vector<Point> start(P, Point(d));
    for (std::size_t p = 0; p < P; ++p) {
      PointStream stream(seed, StreamPurpose::Sample, begin + p);
      for (unsigned i = 0; i < d; ++i) {
        const DensityModel& f = density.factor(i);
        start[p][i] = sample_restricted(f, ball.center[i] - ball.radii[i],
                                        ball.center[i] + ball.radii[i], stream.next_unit());
      }
      batch.set_point(p, start[p]);
    }
    auto& counts = part[c];
    counts.assign(span, 0);
    for (std::size_t n = 1; n <= n_max; ++n) {
      batch.step();
      if (n < n_min) continue;
      const std::vector<double> r = schedule.radii(n);
      for (std::size_t p = 0; p < P; ++p) {
        const ScaleResult s = scale_to_measure(density, start[p], r);
        bool inside = true;
        for (unsigned i = 0; i < d && inside; ++i) {
          inside = std::fabs(batch.coordinate(i)[p] - start[p][i]) < s.xi[i];
        }
        counts[n - n_min] += inside;
      }
    }
  });

  std::size_t passed = 0;
  for (std::size_t k = 0; k < span; ++k) {
    std::uint64_t total = 0;
    for (const auto& p : part) total += p[k];
    const double frac = static_cast<double>(total) / static_cast<double>(samples);
    ScaledRow row;
    row.n = n_min + k;
    row.estimate = rep.mu_B * frac;
    row.stderr_ = rep.mu_B * std::sqrt(frac * (1 - frac) / static_cast<double>(samples));
    double prod = 1.0;
    for (unsigned i = 0; i < d; ++i) prod *= schedule.radius(row.n, i);
    row.lower = 0.5 * rep.mu_B * prod;
    row.upper = 2.0 * rep.mu_B * prod;
    row.pass = row.estimate + 3 * row.stderr_ >= row.lower && row.estimate - 3 * row.stderr_ <= row.upper;
    passed += row.pass;
    rep.rows.push_back(row);
  }
  rep.pass_rate = static_cast<double>(passed) / static_cast<double>(span);
  return rep;
}

}  // namespace reclab
