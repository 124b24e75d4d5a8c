#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

#include "jpmsim/common.hpp"

namespace jpmsim {

/// Number of partial sums used by deterministic_sum. Fixed, so the rounding
/// pattern does not depend on the thread count.
inline constexpr std::size_t kReductionChunks = 64;

/// Sum of term(i) for i in [0, n).
///
/// parallel: the index range is cut into kReductionChunks contiguous chunks,
/// chunks are summed concurrently, and the partials are added in chunk order.
/// The result is bit-identical for any OMP_NUM_THREADS.
/// serial: a single left-to-right loop (the reference).
template <class T, class Term>
T deterministic_sum(std::size_t n, Term&& term, Execution exec = Execution::parallel) {
  if (exec == Execution::serial || n < 4 * kReductionChunks) {
    T total{};
    for (std::size_t i = 0; i < n; ++i) total += term(i);
    return total;
  }
  std::vector<T> partial(kReductionChunks, T{});
  const std::size_t chunk = (n + kReductionChunks - 1) / kReductionChunks;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(kReductionChunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    T acc{};
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    partial[static_cast<std::size_t>(c)] = acc;
  }
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

/// out[i] = f(i) for i in [0, n). Each index writes only its own slot.
/// An exception thrown by f is rethrown on the calling thread (the one from
/// the lowest index when several fail).
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f, Execution exec = Execution::parallel) {
  std::vector<T> out(n);
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::exception_ptr error;
  std::size_t error_index = n;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = f(k);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (k < error_index) {
        error_index = k;
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace jpmsim
