#include <algorithm>
#include <numeric>

#include "geoforge/annotate.hpp"
#include "geoforge/error.hpp"

namespace geoforge {

namespace {

struct RawJunction {
  Point point;
  std::vector<double> branches;
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  // The smaller index stays the root, so a cluster is named by its earliest member.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<double> canonical_branches(std::vector<double> branches) {
  for (double& b : branches) b = normalize_deg(b);
  std::sort(branches.begin(), branches.end());
  std::vector<double> out;
  for (double b : branches)
    if (out.empty() || b - out.back() > kBranchDedupDeg) out.push_back(b);
  // 359.9999999 and 0 are the same direction.
  if (out.size() > 1 && out.front() + 360.0 - out.back() <= kBranchDedupDeg) out.pop_back();
  return out;
}

std::vector<JunctionLabel> extract_junctions(std::span<const ShapeOutline> outlines, int width, int height) {
  std::vector<RawJunction> raw;
  const auto in_canvas = [&](Point p) { return p.x >= 0.0 && p.y >= 0.0 && p.x < width && p.y < height; };

  for (const ShapeOutline& o : outlines)
    for (const Corner& c : o.corners)
      if (in_canvas(c.point)) raw.push_back({c.point, {c.branch_prev, c.branch_next}});

  for (std::size_t i = 0; i < outlines.size(); ++i)
    for (std::size_t j = i + 1; j < outlines.size(); ++j)
      for (const Curve& ca : outlines[i].curves)
        for (const Curve& cb : outlines[j].curves) {
          std::vector<CurveIntersection> hits;
          try {
            hits = intersect_primitives(ca, cb);
          } catch (const DegenerateGeometry&) {
            continue;
          }
          for (auto& h : hits) {
            if (!in_canvas(h.point)) continue;
            RawJunction r{h.point, std::move(h.branches_a)};
            r.branches.insert(r.branches.end(), h.branches_b.begin(), h.branches_b.end());
            raw.push_back(std::move(r));
          }
        }

  DisjointSets sets(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    for (std::size_t j = i + 1; j < raw.size(); ++j)
      if (distance(raw[i].point, raw[j].point) < kJunctionMergeRadius) sets.unite(i, j);

  std::vector<JunctionLabel> out;
  std::vector<std::ptrdiff_t> slot(raw.size(), -1);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::ptrdiff_t>(out.size());
      out.push_back({raw[root].point.x, raw[root].point.y, {}});
    }
    auto& branches = out[static_cast<std::size_t>(slot[root])].branches;
    branches.insert(branches.end(), raw[i].branches.begin(), raw[i].branches.end());
  }
  for (auto& j : out) j.branches = canonical_branches(std::move(j.branches));
  return out;
}

std::vector<JunctionLabel> extract_junctions(const Scene& scene) {
  std::vector<ShapeOutline> outlines;
  for (const ShapeSpec& s : scene.shapes)
    if (!s.is_text()) outlines.push_back(outline_of(s));
  return extract_junctions(outlines, scene.width, scene.height);
}

}  // namespace geoforge
