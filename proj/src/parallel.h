#ifndef CGDIFF_SRC_PARALLEL_H_
#define CGDIFF_SRC_PARALLEL_H_

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace cgdiff::internal {

// Splits [0, n) into contiguous chunks, one per thread. Each index is
// handled by exactly one call, so per-index writes stay deterministic.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  constexpr std::size_t kMinChunk = 4096;
  std::size_t workers = threads > 1 ? static_cast<std::size_t>(threads) : 1;
  workers = std::min(workers, (n + kMinChunk - 1) / kMinChunk);
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin < end) pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  fn(std::size_t{0}, std::min(n, chunk));
}

}  // namespace cgdiff::internal

#endif  // CGDIFF_SRC_PARALLEL_H_
