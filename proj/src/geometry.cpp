// SPDX-License-Identifier: Apache-2.0
#include "reclab/geometry.hpp"

#include <cmath>

#include "reclab/error.hpp"
#include "reclab/parallel.hpp"
#include "reclab/rng.hpp"
#include "reclab/simd/kernels.hpp"

namespace reclab {

const char* to_string(TargetKind kind) {
  return kind == TargetKind::Rect ? "rect" : "hyperboloid";
}

Target Target::rect(Point center, std::vector<double> radii) {
  require(center.size() == radii.size(), ErrorCode::Domain, "rect radii must match dimension");
  for (double r : radii) require(r >= 0, ErrorCode::Domain, "rect radii must be >= 0");
  Target t;
  t.kind = TargetKind::Rect;
  t.center = std::move(center);
  t.radii = std::move(radii);
  return t;
}

Target Target::hyperboloid(Point center, double delta) {
  require(delta >= 0, ErrorCode::Domain, "hyperboloid delta must be >= 0");
  Target t;
  t.kind = TargetKind::Hyperboloid;
  t.center = std::move(center);
  t.delta = delta;
  return t;
}

bool contains(const Target& target, std::span<const double> y) {
  const std::size_t d = target.center.size();
  if (target.kind == TargetKind::Rect) {
    for (std::size_t i = 0; i < d; ++i) {
      if (!(std::fabs(y[i] - target.center[i]) < target.radii[i])) return false;
    }
    return true;
  }
  double product = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double z = std::fabs(y[i] - target.center[i]);
    if (z > 1.0) return false;
    product *= z;
  }
  return product < target.delta;
}

double rect_volume(std::span<const double> radii) {
  double v = 1.0;
  for (double r : radii) v *= 2.0 * r;
  return v;
}

double hyperboloid_ball_volume(double r, double delta, unsigned d) {
  require(d >= 1, ErrorCode::Range, "dimension must be >= 1");
  require(0 < delta && delta < r && r < 1, ErrorCode::Range,
          "hyperboloid volume requires 0 < delta < r < 1");
  const double rd = std::pow(r, static_cast<double>(d));
  require(delta < rd, ErrorCode::Range, "hyperboloid volume requires delta < r^d");
  const double L = std::log(rd / delta);
  double term = 1.0, sum = 0.0;
  for (unsigned t = 0; t < d; ++t) {
    if (t > 0) term *= L / t;
    sum += term;
  }
  return std::ldexp(delta, static_cast<int>(d)) * sum;
}

HyperboloidBounds hyperboloid_volume_bounds(double delta, unsigned d, std::optional<double> r) {
  require(0 < delta && delta < 1, ErrorCode::Range, "bounds require 0 < delta < 1");
  require(d >= 1, ErrorCode::Range, "dimension must be >= 1");
  HyperboloidBounds out;
  const double log_term = std::pow(-std::log(delta), static_cast<double>(d - 1));
  out.upper = d * std::ldexp(delta, static_cast<int>(d)) * log_term;
  out.lower = delta * log_term;
  if (r) {
    out.lower_applies = std::pow(*r, static_cast<double>(d)) > std::sqrt(delta);
    out.exact = hyperboloid_ball_volume(*r, delta, d);
    const bool below_upper = *out.exact <= out.upper;
    out.within = *out.lower_applies ? (below_upper && *out.exact >= out.lower) : below_upper;
  }
  return out;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

std::vector<MinkowskiEstimate> minkowski_content_estimate(const Indicator& indicator,
                                                          const Box& box,
                                                          const std::vector<double>& epsilons,
                                                          std::size_t samples,
                                                          std::uint64_t seed) {
  const std::size_t d = box.lo.size();
  require(d >= 1 && box.hi.size() == d, ErrorCode::Precondition, "malformed bounding box");
  require(samples > 0, ErrorCode::Precondition, "sample count must be positive");
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    require(epsilons[k] > 0 && (k == 0 || epsilons[k] < epsilons[k - 1]),
            ErrorCode::Precondition, "epsilon list must be positive and decreasing");
  }
  std::size_t stencil = 1;
  for (std::size_t i = 0; i < d; ++i) stencil *= 3;
  constexpr unsigned kProbes = 32;

  const std::size_t chunk = 4096;
  const std::size_t chunks = chunk_count(samples, chunk);
  std::vector<std::vector<std::size_t>> partial(chunks, std::vector<std::size_t>(epsilons.size()));

  parallel_chunks(samples, chunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    Point y(d), q(d);
    for (std::size_t s = begin; s < end; ++s) {
      PointStream stream(seed, StreamPurpose::Probe, s);
      for (std::size_t i = 0; i < d; ++i) {
        y[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * stream.next_unit();
      }
      for (std::size_t k = 0; k < epsilons.size(); ++k) {
        const double eps = epsilons[k];
        bool inside = false, outside = false;
        auto probe = [&](const Point& p) {
          (indicator(p) ? inside : outside) = true;
          return inside && outside;
        };
        bool mixed = false;
        for (std::size_t code = 0; code < stencil && !mixed; ++code) {
          std::size_t rest = code;
          for (std::size_t i = 0; i < d; ++i) {
            q[i] = y[i] + eps * (static_cast<double>(rest % 3) - 1.0);
            rest /= 3;
          }
          mixed = probe(q);
        }
        for (unsigned j = 0; j < kProbes; ++j) {
          for (std::size_t i = 0; i < d; ++i) q[i] = y[i] + eps * (2.0 * stream.next_unit() - 1.0);
          if (!mixed) mixed = probe(q);
        }
        if (mixed) ++partial[c][k];
      }
    }
  });

  std::vector<MinkowskiEstimate> out;
  const double vol = box.volume();
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    std::size_t hits = 0;
    for (const auto& p : partial) hits += p[k];
    const double f = static_cast<double>(hits) / static_cast<double>(samples);
    MinkowskiEstimate e;
    e.epsilon = epsilons[k];
    e.samples = samples;
    e.boundary_hits = hits;
    e.estimate = vol * f / epsilons[k];
    e.stderr_ = vol * std::sqrt(f * (1.0 - f) / static_cast<double>(samples)) / epsilons[k];
    out.push_back(e);
  }
  return out;
}

VolumeEstimate hyperboloid_volume_mc(double r, double delta, unsigned d, std::size_t samples,
                                     std::uint64_t seed) {
  require(d >= 1 && r > 0 && delta > 0, ErrorCode::Range, "need d >= 1, r > 0, delta > 0");
  require(samples > 0, ErrorCode::Precondition, "need at least one sample");
  constexpr std::size_t chunk = 4096;
  std::vector<std::uint64_t> hits(chunk_count(samples, chunk), 0);
  const auto& kern = simd::active_kernels();
  parallel_chunks(samples, chunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    const std::size_t P = end - begin;
    PointStream stream(seed, StreamPurpose::Sample, c);
    std::vector<double> y(P), zero(P, 0.0), prod(P, 1.0);
    std::vector<std::uint8_t> mask(P, 1);
    std::vector<std::uint32_t> counts(P, 0);
    for (unsigned i = 0; i < d; ++i) {
      for (std::size_t p = 0; p < P; ++p) y[p] = r * (2.0 * stream.next_unit() - 1.0);
      kern.abs_diff_mul(y.data(), zero.data(), prod.data(), P);
    }
    kern.less_than(prod.data(), delta, mask.data(), P);
    hits[c] = kern.accumulate_mask(mask.data(), counts.data(), P);
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(total) / n;
  const double cube = std::pow(2.0 * r, static_cast<double>(d));
  return {cube * p, cube * std::sqrt(p * (1.0 - p) / n), samples};
}

}  // namespace reclab
