#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "geoforge/annotate.hpp"
#include "geoforge/rng.hpp"

namespace geoforge::testing {

// Junctions in distinct grid cells, each with branches in distinct bins.
inline std::vector<JunctionLabel> random_junction_set(Rng& rng, int width, int height, int max_count = 40) {
  const double cw = width / 60.0, ch = height / 60.0;
  const long n = rng.uniform_int(0, max_count);
  std::vector<long> cells;
  while (static_cast<long>(cells.size()) < n) {
    const long c = rng.uniform_int(0, 3599);
    if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
  }
  std::vector<JunctionLabel> out;
  for (long c : cells) {
    JunctionLabel j;
    j.x = (c % 60 + rng.uniform(0.001, 0.999)) * cw;
    j.y = (c / 60 + rng.uniform(0.001, 0.999)) * ch;
    for (int b = 0; b < 15; ++b)
      if (rng.bernoulli(0.3)) j.branches.push_back(24.0 * b + rng.uniform(0.01, 23.99));
    if (j.branches.empty()) j.branches.push_back(24.0 * rng.uniform_int(0, 14) + 12.0);
    out.push_back(std::move(j));
  }
  return out;
}

inline double angle_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

// Largest position and angle error between two junction sets matched by
// nearest position; negative when the sets cannot be paired.
struct RoundTripError {
  double position = -1.0;
  double angle = -1.0;
};

inline RoundTripError compare_junctions(const std::vector<JunctionLabel>& expect, const std::vector<JunctionLabel>& got) {
  if (expect.size() != got.size()) return {};
  RoundTripError e{0.0, 0.0};
  for (const auto& j : expect) {
    const auto it = std::min_element(got.begin(), got.end(), [&](const auto& a, const auto& b) {
      return std::hypot(a.x - j.x, a.y - j.y) < std::hypot(b.x - j.x, b.y - j.y);
    });
    e.position = std::max(e.position, std::hypot(it->x - j.x, it->y - j.y));
    if (it->branches.size() != j.branches.size()) return {};
    auto a = j.branches, b = it->branches;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t k = 0; k < a.size(); ++k) e.angle = std::max(e.angle, angle_gap(a[k], b[k]));
  }
  return e;
}

}  // namespace geoforge::testing
