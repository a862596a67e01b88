// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "reclab/error.hpp"
#include "reclab/measures.hpp"
#include "reclab/rng.hpp"

using namespace reclab;

namespace {

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

// Two-plateau invariant density of the golden-mean map.
double golden_density(double x) {
  return x < 1.0 / kPhi ? (5.0 + 3.0 * std::sqrt(5.0)) / 10.0 : (5.0 + std::sqrt(5.0)) / 10.0;
}

}  // namespace

TEST_SUITE("measures") {
  TEST_CASE("Parry density") {
    for (double x : {0.0, 0.3, 0.77}) CHECK(parry_density(2.0, x) == doctest::Approx(1.0));
    for (double x : {0.05, 0.2, 0.5, 0.7, 0.9, 0.99}) {
      CHECK(parry_density(kPhi, x) == doctest::Approx(golden_density(x)).epsilon(1e-9));
    }
    CHECK(parry_density(kPhi, 0.2) / parry_density(kPhi, 0.9) == doctest::Approx(kPhi));
    // Total mass by fine midpoint integration.
    for (double beta : {2.5, std::exp(1.0)}) {
      const int n = 200000;
      double total = 0;
      for (int k = 0; k < n; ++k) total += parry_density(beta, (k + 0.5) / n) / n;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
      const auto model = DensityModel::parry(beta);
      CHECK(model.cdf(0.0) == 0.0);
      CHECK(model.cdf(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(DensityModel::parry(-2.0), Error);
  }

  TEST_CASE("Ulam weights") {
    for (double beta : {2.0, -2.0}) {
      const auto u = DensityModel::ulam(ExpandingMap::beta(beta), 64);
      for (double w : u.weights()) CHECK(w == doctest::Approx(1.0 / 64).epsilon(1e-9));
    }
    const auto u = DensityModel::ulam(ExpandingMap::beta(kPhi), 2000);
    // Ulam smears the jump at 1/phi over a boundary layer along its orbit
    // (0, 1/phi, 1); away from it the plateaus are matched closely.
    double sum = 0, worst = 0, l1 = 0;
    for (unsigned k = 0; k < u.bins(); ++k) {
      sum += u.weights()[k];
      const double mid = (k + 0.5) / u.bins();
      const double err = std::fabs(u.weights()[k] * u.bins() - golden_density(mid));
      if (std::fabs(mid - 1.0 / kPhi) > 1.0 / u.bins()) l1 += err / u.bins();
      if (mid > 0.01 && mid < 0.99 && std::fabs(mid - 1.0 / kPhi) > 0.01) worst = std::max(worst, err);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(worst < 0.01);
    CHECK(l1 < 1e-3);
    CHECK(interval_measure(u, 0.0, 1.0 / kPhi) ==
          doctest::Approx(golden_density(0.1) / kPhi).epsilon(0.01));
  }

  TEST_CASE("rectangle measures") {
    const auto leb2 = DensityModel::lebesgue(2);
    CHECK(measure_of_rect(leb2, Target::rect({0.5, 0.5}, {0.1, 0.1})) == doctest::Approx(0.04));
    CHECK(measure_of_rect(DensityModel::lebesgue(1), Target::rect({0.05}, {0.1})) ==
          doctest::Approx(0.15));
    CHECK(measure_of_rect(leb2, Target::rect({0.5, 0.5}, {1.0, 1.0})) == doctest::Approx(1.0).epsilon(1e-9));
    const auto p = DensityModel::parry(kPhi);
    const auto q = DensityModel::parry(2.5);
    const auto prod = DensityModel::product({p, q});
    const auto rect = Target::rect({0.3, 0.6}, {0.1, 0.2});
    CHECK(measure_of_rect(prod, rect) ==
          measure_of_rect(p, Target::rect({0.3}, {0.1})) * measure_of_rect(q, Target::rect({0.6}, {0.2})));
  }

  TEST_CASE("scaling to measure") {
    auto s = scale_to_measure(DensityModel::lebesgue(2), {0.5, 0.5}, {0.01, 0.02});
    CHECK(s.l == doctest::Approx(0.5).epsilon(1e-8));
    s = scale_to_measure(DensityModel::lebesgue(1), {0.0}, {0.1});
    CHECK(s.l == doctest::Approx(1.0).epsilon(1e-8));
    const auto u = DensityModel::ulam(ExpandingMap::beta(kPhi), 1000);
    s = scale_to_measure(u, {0.3}, {0.05});
    CHECK(std::fabs(measure_of_rect(u, Target::rect({0.3}, {s.xi[0]})) - 0.05) < 1e-10);
    CHECK(s.residual < 1e-10);
  }

  TEST_CASE("measure of growing rectangles is monotone") {
    const auto p = DensityModel::parry(2.5);
    double prev = -1;
    for (double t = 0; t < 1.2; t += 0.01) {
      const double m = measure_of_rect(p, Target::rect({0.37}, {t * 0.5}));
      CHECK(m >= prev);
      prev = m;
    }
  }

  TEST_CASE("invariance of the modelled densities") {
    PointStream s(4, StreamPurpose::Auxiliary, 0);
    const auto map = ExpandingMap::beta(kPhi);
    const auto p = DensityModel::parry(kPhi);
    for (int k = 0; k < 50; ++k) {
      double a = s.next_unit(), b = s.next_unit();
      if (a > b) std::swap(a, b);
      CHECK(invariance_residual(map, p, {a, b}) < 1e-9);
    }
    const auto u = DensityModel::ulam(ExpandingMap::beta(-2.5), 1000);
    for (int k = 0; k < 50; ++k) {
      double a = s.next_unit(), b = s.next_unit();
      if (a > b) std::swap(a, b);
      CHECK(invariance_residual(ExpandingMap::beta(-2.5), u, {a, b}) < 0.02);
    }
  }

  TEST_CASE("L^q proxy") {
    CHECK(DensityModel::lebesgue(1).lq_integral(2.0) == doctest::Approx(1.0));
    const double expect = std::pow(golden_density(0.1), 2) / kPhi + std::pow(golden_density(0.9), 2) * (1 - 1 / kPhi);
    CHECK(DensityModel::parry(kPhi).lq_integral(2.0) == doctest::Approx(expect).epsilon(1e-3));
  }
}
