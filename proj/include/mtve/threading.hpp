#ifndef MTVE_THREADING_HPP
#define MTVE_THREADING_HPP

#include <cstddef>
#include <functional>
#include <vector>

// Worker-count control and deterministic reductions.  Results must be
// byte-identical regardless of the number of workers: parallel loops write
// disjoint output slots in a fixed per-slot order, and sums reduce through
// a fixed-shape pairwise tree.

namespace mtve::threading {

// Worker count: MTVE_THREADS when set (positive integer), otherwise the
// hardware default.
int worker_count();

// Runs fn(i) for i in [0, n); partitioning never affects per-slot results.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Fixed-shape pairwise tree sum (independent of worker count).
template <typename T>
T pairwise_sum(const T* data, std::size_t n) {
  if (n == 0) return T{};
  if (n <= 8) {
    T s = data[0];
    for (std::size_t i = 1; i < n; ++i) s += data[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace mtve::threading

#endif
