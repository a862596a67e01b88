// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "reclab/rng.hpp"
#include "reclab/simd/kernels.hpp"

using namespace reclab;
using simd::KernelTable;

namespace {

struct Inputs {
  std::vector<double> x, c, r, v;
  std::vector<std::uint64_t> u, add;
  std::vector<std::uint8_t> mask;
};

Inputs make_inputs(std::size_t n, std::uint64_t seed) {
  PointStream s(seed, StreamPurpose::Auxiliary, n);
  Inputs in;
  for (std::size_t p = 0; p < n; ++p) {
    in.x.push_back(s.next_unit());
    in.c.push_back(s.next_unit());
    in.r.push_back(0.5 * s.next_unit());
    in.v.push_back(s.next_unit() * 0.2);
    in.u.push_back(s.next_u64());
    in.add.push_back(s.next_u64() >> 60);
    in.mask.push_back(static_cast<std::uint8_t>(s.next_below(2)));
  }
  // Edge values: exact branch points, zero, the largest double below 1.
  if (n > 4) {
    in.x[0] = 0.0;
    in.x[1] = 0.5;
    in.x[2] = std::nextafter(1.0, 0.0);
    in.u[3] = ~std::uint64_t{0};
  }
  return in;
}

template <typename T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

void compare(const KernelTable& ref, const KernelTable& alt) {
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 31u, 1000u}) {
    CAPTURE(n);
    const Inputs in = make_inputs(n, 11);

    for (double beta : {2.0, 1.618033988749895, -2.5, 3.0}) {
      auto a = in.x, b = in.x;
      ref.beta_step_f64(beta, a.data(), n);
      alt.beta_step_f64(beta, b.data(), n);
      CHECK(same_bits(a, b));
    }
    for (std::uint64_t slope : {std::uint64_t{2}, std::uint64_t{3}, std::uint64_t{10}, static_cast<std::uint64_t>(-2ll)}) {
      auto a = in.u, b = in.u;
      ref.fixed_affine_step_u64(slope, a.data(), in.add.data(), n);
      alt.fixed_affine_step_u64(slope, b.data(), in.add.data(), n);
      CHECK(same_bits(a, b));
    }
    {
      std::vector<double> a(n), b(n);
      ref.fixed_to_unit_f64(in.u.data(), a.data(), n);
      alt.fixed_to_unit_f64(in.u.data(), b.data(), n);
      CHECK(same_bits(a, b));
    }
    {
      auto ma = in.mask, mb = in.mask;
      ref.abs_diff_less(in.x.data(), in.c.data(), in.r.data(), ma.data(), n);
      alt.abs_diff_less(in.x.data(), in.c.data(), in.r.data(), mb.data(), n);
      CHECK(same_bits(ma, mb));
    }
    {
      std::vector<double> a(n, 1.0), b(n, 1.0);
      ref.abs_diff_mul(in.x.data(), in.c.data(), a.data(), n);
      alt.abs_diff_mul(in.x.data(), in.c.data(), b.data(), n);
      CHECK(same_bits(a, b));
      auto ma = in.mask, mb = in.mask;
      ref.less_than(a.data(), 0.05, ma.data(), n);
      alt.less_than(b.data(), 0.05, mb.data(), n);
      CHECK(same_bits(ma, mb));
    }
    {
      std::vector<std::uint32_t> ca(n, 5), cb(n, 5);
      const auto ta = ref.accumulate_mask(in.mask.data(), ca.data(), n);
      const auto tb = alt.accumulate_mask(in.mask.data(), cb.data(), n);
      CHECK(ta == tb);
      CHECK(same_bits(ca, cb));
    }
  }
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar reference semantics") {
    const auto& k = simd::scalar_kernels();
    double x[3] = {0.75, 0.5, std::nextafter(1.0, 0.0)};
    k.beta_step_f64(2.0, x, 3);
    CHECK(x[0] == 0.5);
    CHECK(x[1] == 0.0);
    CHECK(x[2] < 1.0);
    std::uint64_t u[1] = {std::uint64_t{1} << 63};
    const std::uint64_t add[1] = {1};
    k.fixed_affine_step_u64(2, u, add, 1);
    CHECK(u[0] == 1);
    double out[1];
    k.fixed_to_unit_f64(u, out, 1);
    CHECK(out[0] == 0.0);
  }

  TEST_CASE("AVX2 kernels match the scalar kernels bit for bit") {
    const KernelTable* avx2 = simd::avx2_kernels();
    if (!avx2) {
      MESSAGE("AVX2 variant unavailable on this machine");
      return;
    }
    compare(simd::scalar_kernels(), *avx2);
  }

  TEST_CASE("dispatched table matches the scalar kernels") {
    MESSAGE("active kernels: " << simd::active_kernels().name);
    compare(simd::scalar_kernels(), simd::active_kernels());
  }
}
