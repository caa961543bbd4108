#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

namespace geoforge::detail {

// Fixed-size chunks keep every reduction independent of the thread count:
// chunk partials are computed in parallel and then summed in chunk order.
inline constexpr std::size_t kReduceChunk = 4096;

template <std::size_t N, class Body>
std::array<double, N> chunked_reduce(std::size_t n, Body body) {
  const std::size_t chunks = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<std::array<double, N>> partial(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    std::array<double, N> acc{};
    const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
    const std::size_t hi = std::min(n, lo + kReduceChunk);
    for (std::size_t i = lo; i < hi; ++i) body(i, acc);
    partial[static_cast<std::size_t>(c)] = acc;
  }
  std::array<double, N> total{};
  for (const auto& p : partial)
    for (std::size_t k = 0; k < N; ++k) total[k] += p[k];
  return total;
}

}  // namespace geoforge::detail
