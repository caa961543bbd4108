#include <cmath>

#include "doctest.h"
#include "geoforge/error.hpp"
#include "geoforge/metrics.hpp"
#include "geoforge/rng.hpp"
#include "reference.hpp"

using namespace geoforge;
using namespace geoforge::metrics;

namespace {

// Hand-rolled 101-point AP for a single class, used as an oracle.
double ap_oracle(const std::vector<bool>& tp_in_score_order, std::size_t n_gt) {
  std::vector<double> prec, rec;
  std::size_t tp = 0, seen = 0;
  for (bool t : tp_in_score_order) {
    ++seen;
    tp += t;
    prec.push_back(double(tp) / seen);
    rec.push_back(double(tp) / n_gt);
  }
  double sum = 0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    double best = 0;
    for (std::size_t i = 0; i < prec.size(); ++i)
      if (rec[i] >= r - 1e-12) best = std::max(best, prec[i]);
    sum += best;
  }
  return sum / 101;
}

BoundaryMap ring(int w, int h, int cx, int cy, int r, int shift) {
  BoundaryMap m{w, h, std::vector<float>(static_cast<std::size_t>(w) * h)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int px = x - shift;
      if (std::abs(std::max(std::abs(px - cx), std::abs(y - cy)) - r) == 0) m.values[y * w + x] = 1.0f;
    }
  return m;
}

}  // namespace

TEST_CASE("iou") {
  CHECK(iou({0, 0, 10, 10}, {0, 0, 10, 10}) == 1.0);
  CHECK(iou({0, 0, 10, 10}, {20, 20, 5, 5}) == 0.0);
  const double oracle = 25.0 / (100.0 + 100.0 - 25.0);
  CHECK(std::abs(iou({0, 0, 10, 10}, {5, 5, 10, 10}) - oracle) <= 1e-12);
  CHECK(std::abs(oracle - 1.0 / 7.0) <= 1e-12);
  CHECK_THROWS_AS(iou({0, 0, 0, 10}, {0, 0, 1, 1}), DegenerateGeometry);
}

TEST_CASE("average precision golden cases") {
  const std::vector<Detection> gt{{1, 1, {10, 10, 50, 50}, 1}};
  const std::vector<Detection> hit{{1, 1, {10, 10, 50, 50}, 0.8}};
  CHECK(mean_average_precision(hit, gt).map == 1.0);

  const std::vector<Detection> fp_first{{1, 1, {500, 500, 50, 50}, 0.95}, {1, 1, {10, 10, 50, 50}, 0.9}};
  const auto r = mean_average_precision(fp_first, gt);
  CHECK(r.map == 0.5);
  CHECK(r.map == ap_oracle({false, true}, 1));

  CHECK(mean_average_precision({}, gt).map == 0.0);

  const std::vector<Detection> other{{1, 3, {10, 10, 50, 50}, 0.9}};
  const auto excluded = mean_average_precision(other, gt);
  CHECK(excluded.per_class.size() == 1);
  CHECK(excluded.per_class.count(3) == 0);
}

TEST_CASE("average precision against a hand PR curve") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_gt = 1 + static_cast<int>(rng.uniform_int(0, 9));
    std::vector<Detection> gts, preds;
    for (int i = 0; i < n_gt; ++i) gts.push_back({1, 2, {100.0 * i, 0, 50, 50}, 1});
    std::vector<bool> truth;
    std::vector<int> used(n_gt, 0);
    const int n_pred = static_cast<int>(rng.uniform_int(1, 15));
    for (int i = 0; i < n_pred; ++i) {
      const double score = 1.0 - i * 0.01;
      const int target = static_cast<int>(rng.uniform_int(0, n_gt));
      if (target == n_gt || used[target]) {
        preds.push_back({1, 2, {5000.0 + i * 100, 0, 50, 50}, score});
        truth.push_back(false);
      } else {
        used[target] = 1;
        preds.push_back({1, 2, {100.0 * target, 0, 50, 50}, score});
        truth.push_back(true);
      }
    }
    CHECK(mean_average_precision(preds, gts).map == doctest::Approx(ap_oracle(truth, n_gt)).epsilon(1e-12));
  }
}

TEST_CASE("appending a lowest-confidence miss never raises AP") {
  Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Detection> gts, preds;
    for (int i = 0; i < 6; ++i) gts.push_back({i % 2, 1 + i % 3, {rng.uniform(0, 500), rng.uniform(0, 500), 40, 40}, 1});
    for (int i = 0; i < 10; ++i) {
      const Detection& g = gts[rng.uniform_int(0, 5)];
      preds.push_back({g.image_id, g.category_id, {g.box.x + rng.uniform(-15, 15), g.box.y + rng.uniform(-15, 15), 40, 40},
                       rng.uniform(0.2, 1.0)});
    }
    const auto before = mean_average_precision(preds, gts);
    preds.push_back({0, 1 + static_cast<int>(rng.uniform_int(0, 2)), {9000, 9000, 10, 10}, 0.1});
    const auto after = mean_average_precision(preds, gts);
    for (const auto& [cls, ap] : before.per_class) CHECK(after.per_class.at(cls) <= ap);
  }
}

TEST_CASE("junction score") {
  const std::vector<JunctionLabel> gt{{100, 100, {0, 90}}};
  CHECK(junction_score(std::vector<ScoredJunction>{{gt[0], 1.0}}, gt, 5).f1 == 1.0);

  const auto empty = junction_score({}, gt, 5);
  CHECK(empty.recall == 0.0);
  CHECK(empty.f1 == 0.0);

  const std::vector<ScoredJunction> two{{{101, 100, {0, 90}}, 0.9}, {{100, 102, {0, 90}}, 0.8}};
  const auto s = junction_score(two, gt, 5);
  CHECK(s.precision == 0.5);
  CHECK(s.recall == 1.0);
  CHECK(s.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const std::vector<ScoredJunction> off{{{100, 100, {5, 200}}, 1}};
  CHECK(junction_score(off, gt, 5, 12).branch_accuracy == 0.5);
  CHECK(default_distance_tol(1000, 1000) == doctest::Approx(0.01 * std::sqrt(2e6)));
}

TEST_CASE("junction score is symmetric in its arguments") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<JunctionLabel> a, b;
    for (int i = 0; i < 8; ++i) a.push_back({rng.uniform(0, 100), rng.uniform(0, 100), {0}});
    for (int i = 0; i < 6; ++i) b.push_back({rng.uniform(0, 100), rng.uniform(0, 100), {0}});
    std::vector<ScoredJunction> sa, sb;
    for (const auto& j : a) sa.push_back({j, 1});
    for (const auto& j : b) sb.push_back({j, 1});
    const auto ab = junction_score(sa, b, 10), ba = junction_score(sb, a, 10);
    CHECK(ab.precision == doctest::Approx(ba.recall));
    CHECK(ab.recall == doctest::Approx(ba.precision));
    for (double v : {ab.precision, ab.recall, ab.f1}) {
      CHECK(v >= 0);
      CHECK(v <= 1);
    }
  }
}

TEST_CASE("boundary F1") {
  const BoundaryMap gt = ring(64, 64, 30, 30, 15, 0);
  CHECK(boundary_f1(gt, gt) == 1.0);
  const BoundaryMap empty{64, 64, std::vector<float>(64 * 64)};
  CHECK(boundary_f1(empty, gt) == 0.0);
  CHECK(boundary_f1(empty, empty) == 1.0);

  const BoundaryMap shifted = ring(64, 64, 30, 30, 15, 1);
  std::vector<std::uint8_t> gm(gt.values.size()), pm(gt.values.size());
  for (std::size_t i = 0; i < gm.size(); ++i) {
    gm[i] = gt.values[i] >= 0.5f;
    pm[i] = shifted.values[i] >= 0.5f;
  }
  const auto dg = reference::squared_distance_brute(gm, 64, 64), dp = reference::squared_distance_brute(pm, 64, 64);
  bool oracle_all_within = true;
  for (std::size_t i = 0; i < gm.size(); ++i) {
    if (pm[i]) oracle_all_within &= dg[i] <= 4.0;
    if (gm[i]) oracle_all_within &= dp[i] <= 4.0;
  }
  CHECK(oracle_all_within);
  CHECK(boundary_f1(shifted, gt, 0.5, 2.0) == 1.0);
  CHECK(boundary_f1(ring(64, 64, 30, 30, 15, 4), gt, 0.5, 2.0) < 1.0);
  CHECK_THROWS_AS(boundary_f1(BoundaryMap{3, 3, std::vector<float>(9)}, gt), ShapeMismatch);
}

TEST_CASE("distance transform matches brute force") {
  Rng rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 5 + static_cast<int>(rng.uniform_int(0, 30)), h = 5 + static_cast<int>(rng.uniform_int(0, 30));
    std::vector<std::uint8_t> m(static_cast<std::size_t>(w) * h);
    for (auto& v : m) v = rng.bernoulli(0.05);
    const auto a = squared_distance_transform(m, w, h), b = reference::squared_distance_brute(m, w, h);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
}
