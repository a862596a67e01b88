// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "reclab/error.hpp"
#include "reclab/maps.hpp"

using namespace reclab;

namespace {

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

// Binary words of length n with no two consecutive ones.
std::size_t golden_words(unsigned n) {
  std::size_t count = 0;
  for (unsigned w = 0; w < (1u << n); ++w) count += (w & (w >> 1)) == 0;
  return count;
}

// Distinct digit words seen along a fine midpoint grid.
std::size_t grid_words(double beta, unsigned n, unsigned grid) {
  std::set<std::vector<int>> words;
  for (unsigned k = 0; k < grid; ++k) {
    double x = (k + 0.5) / grid;
    std::vector<int> w;
    for (unsigned j = 0; j < n; ++j) {
      w.push_back(static_cast<int>(std::floor(beta * x)));
      x = beta_step(beta, x);
    }
    words.insert(w);
  }
  return words.size();
}

std::string error_message(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("maps") {
  TEST_CASE("construction rejects non-expanding maps") {
    CHECK(error_message([] { ExpandingMap::beta(0.9); }) == "expansion requires |beta|>1");
    CHECK_THROWS(ExpandingMap::diagonal({2.0, 1.0}));
    const auto msg = error_message([] { ExpandingMap::integer_matrix({{1, 1}, {0, 1}}); });
    CHECK(msg.find("eigenvalue modulus 1") != std::string::npos);
    CHECK_THROWS(ExpandingMap::integer_matrix({{2, 1}, {1, 1}}));
    const auto m = ExpandingMap::integer_matrix({{3, 1}, {1, 2}});
    CHECK(m.expansion_L() == doctest::Approx((5 - std::sqrt(5.0)) / 2));
    CHECK(ExpandingMap::beta(-2.5).branch_count() == 3u);
  }

  TEST_CASE("single steps") {
    CHECK(beta_step(2.0, 0.75) == 0.5);
    CHECK(beta_step(-2.0, 0.25) == 0.5);
    CHECK(frac_unit(3.0) == 0.0);
    CHECK(frac_unit(std::nextafter(1.0, 0.0)) < 1.0);
    CHECK(frac_unit(-1e-17) < 1.0);
    const auto m = ExpandingMap::integer_matrix({{2, 1}, {1, 3}});
    const auto y = apply(m, {0.25, 0.5});
    CHECK(y[0] == doctest::Approx(0.0));
    CHECK(y[1] == doctest::Approx(0.75));
  }

  TEST_CASE("base partition") {
    const auto p = base_partition(ExpandingMap::beta(2.5));
    REQUIRE(p.size() == 3);
    CHECK(p[2].left == doctest::Approx(0.8));
    CHECK(p[2].right == 1.0);
  }

  TEST_CASE("cylinder counts against word enumeration") {
    for (unsigned n = 1; n <= 12; ++n) {
      CHECK(cylinder_count(ExpandingMap::beta(kPhi), n) == golden_words(n));
    }
    for (unsigned n = 1; n <= 10; ++n) CHECK(cylinder_count(ExpandingMap::beta(2.0), n) == (1u << n));
    for (unsigned n = 1; n <= 8; ++n) CHECK(cylinder_count(ExpandingMap::beta(-2.0), n) == (1u << n));
    for (unsigned n = 1; n <= 5; ++n) {
      CHECK(cylinder_count(ExpandingMap::beta(2.5), n) == grid_words(2.5, n, 1u << 20));
      CHECK(cylinder_count(ExpandingMap::beta(-2.5), n) == grid_words(-2.5, n, 1u << 20));
    }
  }

  TEST_CASE("cylinders tile the interval and carry the affine branch") {
    for (double beta : {2.0, kPhi, 2.5, -2.0, -kPhi}) {
      const auto map = ExpandingMap::beta(beta);
      const auto cyl = cylinders(map, 6);
      double expect_left = 0.0;
      for (const auto& c : cyl) {
        CHECK(c.left == doctest::Approx(expect_left).epsilon(1e-12));
        expect_left = c.right;
        const double mid = 0.5 * (c.left + c.right);
        double x = mid;
        for (int k = 0; k < 6; ++k) x = beta_step(beta, x);
        CHECK(frac_unit(c.affine(mid)) == doctest::Approx(x).epsilon(1e-9));
        CHECK(std::fabs(c.slope) == doctest::Approx(std::pow(std::fabs(beta), 6)));
      }
      CHECK(expect_left == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("entropy bound") {
    const auto e = entropy_count_check(ExpandingMap::beta(kPhi), 20, 0.1);
    CHECK(e.pass);
    CHECK(e.log_count_per_n == doctest::Approx(std::log(kPhi)).epsilon(0.05));
  }

  TEST_CASE("overflow guard") {
    CHECK_NOTHROW(check_cylinder_guard(2.0, 1000));
    CHECK_THROWS_AS(check_cylinder_guard(2.0, 1010), Error);
  }

  TEST_CASE("preimages preserve Lebesgue measure for integer slopes") {
    for (double beta : {2.0, 3.0, -2.0}) {
      double total = 0;
      for (const auto& in : preimage_intervals(ExpandingMap::beta(beta), {0.2, 0.45})) total += in.length();
      CHECK(total == doctest::Approx(0.25));
    }
  }
}
