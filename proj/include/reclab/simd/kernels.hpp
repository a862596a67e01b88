// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>

namespace reclab::simd {

/// Inner-loop kernels over structure-of-arrays batches.
///
/// Every variant must produce bit-identical results to the scalar table;
/// the equivalence tests compare them element by element. Masks are one
/// byte per lane holding 0 or 1.
struct KernelTable {
  const char* name;

  /// x[p] <- frac(beta * x[p]), clamped below 1.
  void (*beta_step_f64)(double beta, double* x, std::size_t n);
  /// x[p] <- b * x[p] + add[p]  (mod 2^64).
  void (*fixed_affine_step_u64)(std::uint64_t b, std::uint64_t* x, const std::uint64_t* add,
                                std::size_t n);
  /// out[p] <- top 52 bits of x[p] as a double in [0,1).
  void (*fixed_to_unit_f64)(const std::uint64_t* x, double* out, std::size_t n);
  /// mask[p] &= |y[p] - c[p]| < r[p].
  void (*abs_diff_less)(const double* y, const double* c, const double* r, std::uint8_t* mask,
                        std::size_t n);
  /// prod[p] *= |y[p] - c[p]|.
  void (*abs_diff_mul)(const double* y, const double* c, double* prod, std::size_t n);
  /// mask[p] &= v[p] < bound.
  void (*less_than)(const double* v, double bound, std::uint8_t* mask, std::size_t n);
  /// counts[p] += mask[p]; returns the number of set lanes.
  std::uint64_t (*accumulate_mask)(const std::uint8_t* mask, std::uint32_t* counts,
                                   std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();

/// Best available table; RECLAB_SIMD=scalar forces the reference path.
const KernelTable& active_kernels();

}  // namespace reclab::simd
