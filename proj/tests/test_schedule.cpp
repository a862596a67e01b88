// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "reclab/error.hpp"
#include "reclab/schedule.hpp"

using namespace reclab;

TEST_SUITE("schedule") {
  TEST_CASE("radii") {
    const auto p = RadiiSchedule::power_law({0.1}, {1.0});
    CHECK(p.radius(10, 0) == doctest::Approx(0.01));
    const auto e = RadiiSchedule::exponential({1.0, 2.0}, {0.5, 1.0});
    CHECK(e.radius(2, 1) == doctest::Approx(2 * std::exp(-2.0)));
    const auto b = RadiiSchedule::beta_power({2.0}, {1.0});
    CHECK(b.radius(5, 0) == doctest::Approx(1.0 / 32));
    const auto t = RadiiSchedule::table({{0.3}, {0.2}});
    CHECK(t.radius(2, 0) == 0.2);
    CHECK(t.length() == 2u);
    CHECK_THROWS_AS(t.radius(3, 0), Error);
  }

  TEST_CASE("closed-form accumulation exponents") {
    CHECK((*RadiiSchedule::power_law({1.0}, {2.0}).accumulation_exponents())[0] == 0.0);
    CHECK((*RadiiSchedule::exponential({1.0}, {0.7}).accumulation_exponents())[0] == 0.7);
    CHECK((*RadiiSchedule::beta_power({4.0}, {0.5}).accumulation_exponents())[0] ==
          doctest::Approx(std::log(2.0)));
    CHECK_FALSE(RadiiSchedule::table({{0.1}}).accumulation_exponents().has_value());
  }

  TEST_CASE("series classification") {
    CHECK(classify_series(RadiiSchedule::power_law({1.0}, {1.0}), TargetKind::Rect, 1).verdict ==
          SeriesClass::Divergent);
    CHECK(classify_series(RadiiSchedule::power_law({1.0, 1.0}, {0.6, 0.6}), TargetKind::Rect, 2).verdict ==
          SeriesClass::Convergent);
    CHECK(classify_series(RadiiSchedule::power_law({1.0}, {1.5}), TargetKind::Rect, 1).verdict ==
          SeriesClass::Convergent);
    CHECK(classify_series(RadiiSchedule::exponential({1.0}, {0.0}), TargetKind::Rect, 1).verdict ==
          SeriesClass::Divergent);
    CHECK(classify_series(RadiiSchedule::beta_power({2.0}, {0.1}), TargetKind::Rect, 1).verdict ==
          SeriesClass::Convergent);
    CHECK(classify_series(RadiiSchedule::power_law({0.5}, {1.0}), TargetKind::Hyperboloid, 2).verdict ==
          SeriesClass::Divergent);

    std::vector<std::vector<double>> rows;
    for (int n = 1; n <= 100; ++n) {
      rows.push_back({1.0 / (n * std::pow(std::log(n + 1.0), 3))});
    }
    const auto c = classify_series(RadiiSchedule::table(rows), TargetKind::Hyperboloid, 2);
    CHECK(c.verdict == SeriesClass::Undetermined);
    REQUIRE(c.partial_sums.size() == 100);
    const double first = series_term(RadiiSchedule::table(rows), TargetKind::Hyperboloid, 2, 1);
    CHECK(c.partial_sums[0] == first);
    CHECK(first == doctest::Approx(rows[0][0] * -std::log(rows[0][0])));
  }

  TEST_CASE("partial sums of the rectangle series") {
    const auto c = classify_series(RadiiSchedule::power_law({0.1, 0.2}, {1.0, 1.0}), TargetKind::Rect, 2, 4);
    REQUIRE(c.partial_sums.size() == 4);
    CHECK(c.partial_sums[3] == doctest::Approx(0.02 * (1 + 0.25 + 1.0 / 9 + 1.0 / 16)));
  }
}
