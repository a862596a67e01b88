// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace reclab {

/// Resolve the worker count: explicit override, then RECLAB_THREADS, then
/// hardware concurrency. Always >= 1.
unsigned resolve_threads(unsigned requested = 0);

/// Process-wide default used when callers pass 0.
void set_default_threads(unsigned threads);
unsigned default_threads();

/// Deterministic chunked fan-out.
///
/// [0, count) is cut into fixed-size chunks independent of the thread
/// count; `body(chunk_index, begin, end)` runs once per chunk, possibly
/// concurrently. Callers store per-chunk partial results indexed by chunk
/// and reduce them in chunk order afterwards, which makes results
/// bit-identical for any number of threads.
void parallel_chunks(std::size_t count, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body,
                     unsigned threads = 0);

inline std::size_t chunk_count(std::size_t count, std::size_t chunk) {
  return (count + chunk - 1) / chunk;
}

/// Compensated (Neumaier) summation in the given order.
class NeumaierSum {
 public:
  void add(double value);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double ordered_sum(const std::vector<double>& values);

}  // namespace reclab
