// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "reclab/parallel.hpp"

using namespace reclab;

TEST_SUITE("parallel") {
  TEST_CASE("chunks cover the range exactly once for any thread count") {
    for (unsigned threads : {1u, 2u, 5u}) {
      std::vector<int> seen(1003, 0);
      parallel_chunks(seen.size(), 64, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) ++seen[k];
      }, threads);
      for (int v : seen) REQUIRE(v == 1);
    }
    CHECK(chunk_count(1003, 64) == 16);
  }

  TEST_CASE("exceptions propagate to the caller") {
    CHECK_THROWS_AS(parallel_chunks(100, 10, [](std::size_t c, std::size_t, std::size_t) {
      if (c == 3) throw std::runtime_error("boom");
    }, 3), std::runtime_error);
  }

  TEST_CASE("compensated sum") {
    NeumaierSum s;
    s.add(1.0);
    s.add(1e100);
    s.add(1.0);
    s.add(-1e100);
    CHECK(s.value() == 2.0);
    CHECK(ordered_sum({0.1, 0.2, 0.3}) == doctest::Approx(0.6).epsilon(1e-15));
  }

  TEST_CASE("thread resolution") {
    CHECK(resolve_threads(3) == 3);
    CHECK(resolve_threads(0) >= 1);
  }
}
