// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstring>

#include "reclab/simd/kernels.hpp"

namespace reclab::simd {
namespace {

void beta_step(double beta, double* x, std::size_t n) {
  const double below_one = std::nextafter(1.0, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    const double y = beta * x[p];
    const double f = y - std::floor(y);
    x[p] = f < below_one ? f : below_one;
  }
}

void fixed_affine_step(std::uint64_t b, std::uint64_t* x, const std::uint64_t* add,
                       std::size_t n) {
  for (std::size_t p = 0; p < n; ++p) x[p] = b * x[p] + add[p];
}

void fixed_to_unit(const std::uint64_t* x, double* out, std::size_t n) {
  for (std::size_t p = 0; p < n; ++p) {
    const std::uint64_t bits = (x[p] >> 12) | 0x3FF0000000000000ull;
    double v;
    std::memcpy(&v, &bits, sizeof v);
    out[p] = v - 1.0;
  }
}

void abs_diff_less(const double* y, const double* c, const double* r, std::uint8_t* mask,
                   std::size_t n) {
  for (std::size_t p = 0; p < n; ++p) mask[p] &= std::fabs(y[p] - c[p]) < r[p] ? 1 : 0;
}

void abs_diff_mul(const double* y, const double* c, double* prod, std::size_t n) {
  for (std::size_t p = 0; p < n; ++p) prod[p] *= std::fabs(y[p] - c[p]);
}

void less_than(const double* v, double bound, std::uint8_t* mask, std::size_t n) {
  for (std::size_t p = 0; p < n; ++p) mask[p] &= v[p] < bound ? 1 : 0;
}

std::uint64_t accumulate_mask(const std::uint8_t* mask, std::uint32_t* counts, std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t p = 0; p < n; ++p) {
    counts[p] += mask[p];
    total += mask[p];
  }
  return total;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",       beta_step,    fixed_affine_step,
                                 fixed_to_unit,  abs_diff_less, abs_diff_mul,
                                 less_than,      accumulate_mask};
  return table;
}

}  // namespace reclab::simd
