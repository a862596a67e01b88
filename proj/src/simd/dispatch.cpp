// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <cstring>

#include "reclab/simd/kernels.hpp"

namespace reclab::simd {

#if !RECLAB_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

const KernelTable& active_kernels() {
  static const KernelTable* table = [] {
    const char* forced = std::getenv("RECLAB_SIMD");
    if (forced && std::strcmp(forced, "scalar") == 0) return &scalar_kernels();
    if (const KernelTable* avx2 = avx2_kernels()) return avx2;
    return &scalar_kernels();
  }();
  return *table;
}

}  // namespace reclab::simd
