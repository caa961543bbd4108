#include <algorithm>
#include <cmath>
#include <optional>

#include "doctest.h"
#include "geoforge/annotate.hpp"
#include "geoforge/error.hpp"
#include "geoforge/metrics.hpp"
#include "geoforge/render.hpp"
#include "geoforge/rng.hpp"
#include "geoforge/scene.hpp"

using namespace geoforge;

namespace {

// Cramer's rule on a + s(b - a) = c + t(d - c).
std::optional<Point> solve_segments(Point a, Point b, Point c, Point d) {
  const double a11 = b.x - a.x, a12 = -(d.x - c.x), a21 = b.y - a.y, a22 = -(d.y - c.y);
  const double det = a11 * a22 - a12 * a21;
  if (det == 0) return std::nullopt;
  const double r1 = c.x - a.x, r2 = c.y - a.y;
  const double s = (r1 * a22 - a12 * r2) / det, t = (a11 * r2 - r1 * a21) / det;
  if (s < 0 || s > 1 || t < 0 || t > 1) return std::nullopt;
  return Point{a.x + s * a11, a.y + s * a21};
}

// Approximate geometric distance from p to a curve.
double residual(const Curve& c, Point p) {
  if (const auto* s = std::get_if<SegmentCurve>(&c)) {
    const Point d = s->b - s->a;
    return std::abs(cross(d, p - s->a)) / norm(d);
  }
  if (const auto* k = std::get_if<CircleCurve>(&c)) return std::abs(distance(p, k->center) - k->radius);
  const auto& e = std::get<EllipseCurve>(c);
  const double t = deg_to_rad(e.rotation_deg);
  const double dx = p.x - e.center.x, dy = p.y - e.center.y;
  const double u = dx * std::cos(t) + dy * std::sin(t), v = -dx * std::sin(t) + dy * std::cos(t);
  const double f = u * u / (e.a * e.a) + v * v / (e.b * e.b) - 1.0;
  const double gu = 2 * u / (e.a * e.a), gv = 2 * v / (e.b * e.b);
  return std::abs(f) / std::hypot(gu, gv);
}

ShapeOutline segment_outline(Point a, Point b) { return {{SegmentCurve{a, b}}, {}}; }

}  // namespace

TEST_CASE("crossing segments") {
  const auto r = intersect_primitives(SegmentCurve{{0, 0}, {10, 10}}, SegmentCurve{{0, 10}, {10, 0}});
  REQUIRE(r.size() == 1);
  const auto oracle = solve_segments({0, 0}, {10, 10}, {0, 10}, {10, 0});
  CHECK(r[0].point.x == doctest::Approx(oracle->x).epsilon(1e-12));
  CHECK(r[0].point.y == doctest::Approx(oracle->y).epsilon(1e-12));
  auto all = r[0].branches_a;
  all.insert(all.end(), r[0].branches_b.begin(), r[0].branches_b.end());
  all = canonical_branches(all);
  REQUIRE(all.size() == 4);
  const double expect[] = {45, 135, 225, 315};
  for (int i = 0; i < 4; ++i) CHECK(all[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("circle against its horizontal diameter") {
  const Point c{100, 100};
  const auto r = intersect_primitives(CircleCurve{c, 5}, SegmentCurve{{90, 100}, {110, 100}});
  REQUIRE(r.size() == 2);
  const auto right = std::find_if(r.begin(), r.end(), [](const auto& i) { return i.point.x > 100; });
  REQUIRE(right != r.end());
  CHECK(right->point.x == doctest::Approx(105).epsilon(1e-12));
  CHECK(right->point.y == doctest::Approx(100).epsilon(1e-12));
  CHECK(canonical_branches(right->branches_a) == std::vector<double>{90, 270});
  CHECK(canonical_branches(right->branches_b) == std::vector<double>{0, 180});
}

TEST_CASE("parallel and collinear segments") {
  CHECK(intersect_primitives(SegmentCurve{{0, 0}, {10, 0}}, SegmentCurve{{0, 5}, {10, 5}}).empty());
  CHECK_THROWS_AS(intersect_primitives(SegmentCurve{{0, 0}, {10, 0}}, SegmentCurve{{5, 0}, {15, 0}}),
                  DegenerateGeometry);
}

TEST_CASE("tangent line touches a circle once") {
  const auto r = intersect_primitives(CircleCurve{{50, 50}, 10}, SegmentCurve{{30, 60}, {70, 60}});
  REQUIRE(r.size() == 1);
  CHECK(r[0].point.x == doctest::Approx(50));
  CHECK(r[0].point.y == doctest::Approx(60));
}

TEST_CASE("segment endpoint contributes one direction") {
  const auto r = intersect_primitives(SegmentCurve{{0, 0}, {10, 0}}, SegmentCurve{{5, 0}, {5, 10}});
  REQUIRE(r.size() == 1);
  CHECK(r[0].branches_a.size() == 2);
  CHECK(r[0].branches_b == std::vector<double>{90});
}

TEST_CASE("coincident circles are degenerate") {
  CHECK_THROWS_AS(intersect_primitives(CircleCurve{{5, 5}, 3}, CircleCurve{{5, 5}, 3}), DegenerateGeometry);
}

TEST_CASE("intersections are symmetric and lie on both curves") {
  Rng rng(2024);
  auto random_curve = [&](int kind) -> Curve {
    const Point c{rng.uniform(300, 700), rng.uniform(300, 700)};
    if (kind == 0) {
      const double t = rng.uniform(0, 2 * M_PI), len = rng.uniform(100, 400);
      return SegmentCurve{c - Point{len * std::cos(t), len * std::sin(t)}, c + Point{len * std::cos(t), len * std::sin(t)}};
    }
    if (kind == 1) return CircleCurve{c, rng.uniform(30, 250)};
    return EllipseCurve{c, rng.uniform(60, 250), rng.uniform(20, 150), rng.uniform(0, 180)};
  };
  int checked = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const Curve a = random_curve(trial % 3), b = random_curve((trial / 3) % 3);
    std::vector<CurveIntersection> ab, ba;
    try {
      ab = intersect_primitives(a, b);
      ba = intersect_primitives(b, a);
    } catch (const DegenerateGeometry&) {
      continue;
    }
    REQUIRE(ab.size() == ba.size());
    for (const auto& p : ab) {
      const bool found = std::any_of(ba.begin(), ba.end(), [&](const auto& q) { return distance(p.point, q.point) <= 1e-9; });
      CHECK(found);
      CHECK(residual(a, p.point) <= 1e-6);
      CHECK(residual(b, p.point) <= 1e-6);
      ++checked;
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("two crossing segments form one four-branch junction") {
  const std::vector<ShapeOutline> o{segment_outline({100, 100}, {200, 200}), segment_outline({100, 200}, {200, 100})};
  const auto j = extract_junctions(o, 1000, 1000);
  REQUIRE(j.size() == 1);
  CHECK(j[0].x == doctest::Approx(150));
  CHECK(j[0].y == doctest::Approx(150));
  CHECK(j[0].branches.size() == 4);
}

TEST_CASE("k crossing segments give k(k-1)/2 junctions") {
  Rng rng(77);
  for (int k = 2; k <= 8; ++k) {
    std::vector<ShapeOutline> o;
    std::vector<std::pair<Point, Point>> segs;
    for (int i = 0; i < k; ++i) {
      const Point c{500 + rng.uniform(-20, 20), 500 + rng.uniform(-20, 20)};
      const double t = deg_to_rad(i * 180.0 / k + rng.uniform(-3, 3));
      const Point d{400 * std::cos(t), 400 * std::sin(t)};
      segs.emplace_back(c - d, c + d);
      o.push_back(segment_outline(c - d, c + d));
    }
    std::vector<Point> brute;
    for (int i = 0; i < k; ++i)
      for (int m = i + 1; m < k; ++m)
        if (auto p = solve_segments(segs[i].first, segs[i].second, segs[m].first, segs[m].second)) brute.push_back(*p);
    REQUIRE(brute.size() == static_cast<std::size_t>(k * (k - 1) / 2));
    double closest = 1e300;
    for (std::size_t i = 0; i < brute.size(); ++i)
      for (std::size_t m = i + 1; m < brute.size(); ++m) closest = std::min(closest, distance(brute[i], brute[m]));
    if (closest < 2 * kJunctionMergeRadius) continue;
    const auto j = extract_junctions(o, 1000, 1000);
    CHECK(j.size() == brute.size());
    for (const auto& jl : j) CHECK(jl.branches.size() == 4);
  }
}

TEST_CASE("scene junctions") {
  Scene rect;
  rect.shapes.push_back({ShapeKind::rectangle, PolygonGeom{{{100, 100}, {300, 100}, {300, 200}, {100, 200}}}, 0});
  const auto j = extract_junctions(rect);
  REQUIRE(j.size() == 4);
  for (const auto& jl : j) CHECK(jl.branches.size() == 2);

  Scene circle;
  circle.shapes.push_back({ShapeKind::circle, CircleGeom{{500, 500}, 80}, 0});
  CHECK(extract_junctions(circle).empty());

  Scene text = rect;
  text.shapes.push_back({ShapeKind::text, TextGeom{150, 160, "AB", 28}, 1});
  CHECK(extract_junctions(text).size() == 4);
}

TEST_CASE("junction labels satisfy their invariants") {
  GenConfig c;
  c.count = 60;
  for (long i = 0; i < 60; ++i) {
    const Scene s = sample_scene(c, i);
    for (const auto& j : extract_junctions(s)) {
      CHECK(j.x >= 0);
      CHECK(j.x < s.width);
      CHECK(j.y >= 0);
      CHECK(j.y < s.height);
      REQUIRE_FALSE(j.branches.empty());
      for (std::size_t k = 0; k < j.branches.size(); ++k) {
        CHECK(j.branches[k] >= 0);
        CHECK(j.branches[k] < 360);
        if (k) CHECK(j.branches[k] - j.branches[k - 1] > kBranchDedupDeg);
      }
    }
  }
}

TEST_CASE("boundary heatmap") {
  Scene empty;
  const BoundaryMap e = boundary_heatmap(empty);
  CHECK(std::all_of(e.values.begin(), e.values.end(), [](float v) { return v == 0.0f; }));

  Scene rect;
  rect.shapes.push_back({ShapeKind::rectangle, PolygonGeom{{{100, 100}, {300, 100}, {300, 200}, {100, 200}}}, 0});
  const BoundaryMap hard = boundary_heatmap(rect, 2, 0.0);
  const GrayImage mask = outline_mask(rect, 2);
  for (std::size_t i = 0; i < hard.values.size(); ++i) {
    CHECK((hard.values[i] == 0.0f || hard.values[i] == 1.0f));
    CHECK((hard.values[i] == 1.0f) == (mask.pixels[i] != 0));
  }

  const BoundaryMap soft = boundary_heatmap(rect, 2, 1.0);
  CHECK(*std::max_element(soft.values.begin(), soft.values.end()) == 1.0f);
  CHECK(*std::min_element(soft.values.begin(), soft.values.end()) == 0.0f);
  const auto d2 = metrics::squared_distance_transform(mask.pixels, mask.width, mask.height);
  const double reach = std::ceil(3.0) * std::sqrt(2.0);
  for (std::size_t i = 0; i < soft.values.size(); ++i)
    if (std::sqrt(d2[i]) > reach) CHECK(soft.values[i] == 0.0f);
}

TEST_CASE("boundary of a union is the pixelwise max") {
  GenConfig c;
  c.count = 5;
  c.text_prob = 0.3;
  for (long i = 0; i < 5; ++i) {
    const Scene s = sample_scene(c, i);
    Scene a = s, b = s;
    a.shapes.resize(s.shapes.size() / 2);
    b.shapes.erase(b.shapes.begin(), b.shapes.begin() + s.shapes.size() / 2);
    const BoundaryMap u = boundary_heatmap(s, 2, 0.0);
    const BoundaryMap ma = boundary_heatmap(a, 2, 0.0), mb = boundary_heatmap(b, 2, 0.0);
    bool equal = true;
    for (std::size_t k = 0; k < u.values.size(); ++k) equal &= u.values[k] == std::max(ma.values[k], mb.values[k]);
    CHECK(equal);
  }
}

TEST_CASE("boundary PNG round trip") {
  GenConfig c;
  c.count = 2;
  const BoundaryMap m = boundary_heatmap(sample_scene(c, 1));
  const GrayImage g = to_gray(m);
  for (std::size_t i = 0; i < m.values.size(); i += 97) CHECK(g.pixels[i] == std::lround(255.0 * m.values[i]));
  const BoundaryMap back = from_gray(g);
  for (std::size_t i = 0; i < m.values.size(); i += 97) CHECK(std::abs(back.values[i] - m.values[i]) <= 0.5f / 255.0f + 1e-7f);
}
