// SPDX-License-Identifier: Apache-2.0
// Compiled with -mavx2 only; reached through the dispatch table after a
// CPUID check.
#include <immintrin.h>

#include <cmath>

#include "reclab/simd/kernels.hpp"

namespace reclab::simd {
namespace {

const KernelTable& scalar() { return scalar_kernels(); }

void beta_step(double beta, double* x, std::size_t n) {
  const __m256d vb = _mm256_set1_pd(beta);
  const __m256d below_one = _mm256_set1_pd(std::nextafter(1.0, 0.0));
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    const __m256d y = _mm256_mul_pd(vb, _mm256_loadu_pd(x + p));
    const __m256d f = _mm256_sub_pd(y, _mm256_floor_pd(y));
    _mm256_storeu_pd(x + p, _mm256_min_pd(f, below_one));
  }
  scalar().beta_step_f64(beta, x + p, n - p);
}

// 64x64 -> low 64 multiply from three 32x32 partial products.
inline __m256i mullo_epi64(__m256i a, __m256i b) {
  const __m256i lo = _mm256_mul_epu32(a, b);
  const __m256i a_hi = _mm256_srli_epi64(a, 32);
  const __m256i b_hi = _mm256_srli_epi64(b, 32);
  const __m256i cross = _mm256_add_epi64(_mm256_mul_epu32(a_hi, b), _mm256_mul_epu32(a, b_hi));
  return _mm256_add_epi64(lo, _mm256_slli_epi64(cross, 32));
}

void fixed_affine_step(std::uint64_t b, std::uint64_t* x, const std::uint64_t* add,
                       std::size_t n) {
  const __m256i vb = _mm256_set1_epi64x(static_cast<long long>(b));
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + p));
    v = _mm256_add_epi64(mullo_epi64(vb, v),
                         _mm256_loadu_si256(reinterpret_cast<const __m256i*>(add + p)));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(x + p), v);
  }
  scalar().fixed_affine_step_u64(b, x + p, add + p, n - p);
}

void fixed_to_unit(const std::uint64_t* x, double* out, std::size_t n) {
  const __m256i exponent = _mm256_set1_epi64x(0x3FF0000000000000ll);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + p));
    const __m256i bits = _mm256_or_si256(_mm256_srli_epi64(v, 12), exponent);
    _mm256_storeu_pd(out + p, _mm256_sub_pd(_mm256_castsi256_pd(bits), one));
  }
  scalar().fixed_to_unit_f64(x + p, out + p, n - p);
}

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// Four lane predicates (movemask bits) folded into four mask bytes.
inline void and_mask4(std::uint8_t* mask, int bits) {
  mask[0] &= bits & 1;
  mask[1] &= (bits >> 1) & 1;
  mask[2] &= (bits >> 2) & 1;
  mask[3] &= (bits >> 3) & 1;
}

void abs_diff_less(const double* y, const double* c, const double* r, std::uint8_t* mask,
                   std::size_t n) {
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    const __m256d d = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(y + p), _mm256_loadu_pd(c + p)));
    const __m256d lt = _mm256_cmp_pd(d, _mm256_loadu_pd(r + p), _CMP_LT_OQ);
    and_mask4(mask + p, _mm256_movemask_pd(lt));
  }
  scalar().abs_diff_less(y + p, c + p, r + p, mask + p, n - p);
}

void abs_diff_mul(const double* y, const double* c, double* prod, std::size_t n) {
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    const __m256d d = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(y + p), _mm256_loadu_pd(c + p)));
    _mm256_storeu_pd(prod + p, _mm256_mul_pd(_mm256_loadu_pd(prod + p), d));
  }
  scalar().abs_diff_mul(y + p, c + p, prod + p, n - p);
}

void less_than(const double* v, double bound, std::uint8_t* mask, std::size_t n) {
  const __m256d vb = _mm256_set1_pd(bound);
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    const __m256d lt = _mm256_cmp_pd(_mm256_loadu_pd(v + p), vb, _CMP_LT_OQ);
    and_mask4(mask + p, _mm256_movemask_pd(lt));
  }
  scalar().less_than(v + p, bound, mask + p, n - p);
}

std::uint64_t accumulate_mask(const std::uint8_t* mask, std::uint32_t* counts, std::size_t n) {
  std::uint64_t total = 0;
  std::size_t p = 0;
  for (; p + 8 <= n; p += 8) {
    const __m128i m8 = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(mask + p));
    const __m256i m32 = _mm256_cvtepu8_epi32(m8);
    __m256i c = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(counts + p));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(counts + p), _mm256_add_epi32(c, m32));
    total += static_cast<std::uint64_t>(__builtin_popcountll(
        static_cast<unsigned long long>(_mm_cvtsi128_si64(m8))));
  }
  return total + scalar().accumulate_mask(mask + p, counts + p, n - p);
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{"avx2",        beta_step,     fixed_affine_step,
                                 fixed_to_unit, abs_diff_less, abs_diff_mul,
                                 less_than,     accumulate_mask};
  return __builtin_cpu_supports("avx2") ? &table : nullptr;
}

}  // namespace reclab::simd
