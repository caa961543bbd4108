#include "doctest.h"
#include "geoforge/error.hpp"
#include "geoforge/junction_codec.hpp"
#include "support.hpp"

using namespace geoforge;
using namespace geoforge::codec;

namespace {

float at(const Tensor& t, std::size_t row, std::size_t col, std::size_t ch) {
  return t.data[(row * kGridCols + col) * kChannels + ch];
}

std::vector<JunctionLabel> labels_of(const std::vector<DecodedJunction>& d) {
  std::vector<JunctionLabel> out;
  for (const auto& j : d) out.push_back(j.label);
  return out;
}

}  // namespace

TEST_CASE("encode worked example") {
  const std::vector<JunctionLabel> j{{505, 505, {90}}};
  const Tensor t = encode(j, {1000, 1000});
  const double cell = 1000.0 / 60.0;
  const auto idx = static_cast<std::size_t>(std::floor(505 / cell));
  const double offset = (505 - (idx + 0.5) * cell) / cell;
  CHECK(idx == 30);
  CHECK(offset == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(at(t, 30, 30, kCellConf) == 1.0f);
  CHECK(at(t, 30, 30, kDx) == doctest::Approx(offset).epsilon(1e-6));
  CHECK(at(t, 30, 30, kDy) == doctest::Approx(offset).epsilon(1e-6));
  CHECK(at(t, 30, 30, kBinConf + 3) == 1.0f);
  CHECK(at(t, 30, 30, kBinResidual + 3) == doctest::Approx((90.0 - (24 * 3 + 12)) / 24.0).epsilon(1e-6));
  CHECK(at(t, 30, 30, kBinResidual + 3) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(count_positive_cells(t) == 1);
}

TEST_CASE("encode edge cases") {
  const Tensor z = encode({}, {1000, 1000});
  CHECK(z.shape == std::vector<std::size_t>{60, 60, 33});
  CHECK(std::all_of(z.data.begin(), z.data.end(), [](float v) { return v == 0.0f; }));

  const double cell = 1000.0 / 60.0;
  const std::vector<JunctionLabel> centered{{7.5 * cell, 2.5 * cell, {0}}};
  const Tensor c = encode(centered, {1000, 1000});
  CHECK(at(c, 2, 7, kDx) == 0.0f);
  CHECK(at(c, 2, 7, kDy) == 0.0f);

  const std::vector<JunctionLabel> outside{{1000, 5, {0}}};
  CHECK_THROWS_AS(encode(outside, {1000, 1000}), Error);
  const std::vector<JunctionLabel> negative{{-0.1, 5, {0}}};
  CHECK_THROWS_AS(encode(negative, {1000, 1000}), Error);
}

TEST_CASE("collisions keep the junction nearest the cell center") {
  const double cell = 1000.0 / 60.0;
  const std::vector<JunctionLabel> j{{0.1 * cell, 0.1 * cell, {10}}, {0.45 * cell, 0.55 * cell, {200}}};
  const Tensor t = encode(j, {1000, 1000});
  CHECK(count_positive_cells(t) == 1);
  CHECK(at(t, 0, 0, kBinConf + 8) == 1.0f);
  CHECK(at(t, 0, 0, kBinConf + 0) == 0.0f);
}

TEST_CASE("bins") {
  CHECK(assign_bin(90).bin == 3);
  CHECK(assign_bin(0).bin == 0);
  CHECK(assign_bin(0).residual == doctest::Approx(-0.5));
  CHECK(assign_bin(359.9).bin == 14);
  CHECK(bin_center_deg(0) == 12.0);
  CHECK(bin_center_deg(14) == 348.0);
}

TEST_CASE("decode worked example") {
  Tensor t = empty_grid();
  t.data[kCellConf] = 1.0f;
  t.data[kBinConf] = 1.0f;
  const auto d = decode(t, {}, {1000, 1000});
  REQUIRE(d.size() == 1);
  CHECK(d[0].label.x == doctest::Approx(500.0 / 60.0).epsilon(1e-9));
  CHECK(d[0].label.y == doctest::Approx(8.333).epsilon(1e-4));
  REQUIRE(d[0].label.branches.size() == 1);
  CHECK(d[0].label.branches[0] == doctest::Approx(12.0));
  CHECK_FALSE(d[0].branchless);
}

TEST_CASE("decode edge cases") {
  CHECK(decode(empty_grid(), {}, {1000, 1000}).empty());
  CHECK_THROWS_AS(decode(Tensor({60, 60, 32}), {}, {1000, 1000}), ShapeMismatch);
  CHECK_THROWS_AS(decode(empty_grid(), {0.0, 0.5}, {1000, 1000}), Error);
  CHECK_THROWS_AS(decode(empty_grid(), {0.5, 1.0}, {1000, 1000}), Error);

  Tensor t = empty_grid();
  t.data[(5 * 60 + 5) * kChannels + kCellConf] = 0.9f;
  const auto d = decode(t, {}, {1000, 1000});
  REQUIRE(d.size() == 1);
  CHECK(d[0].branchless);
  CHECK(d[0].label.branches.empty());
  CHECK(d[0].confidence == doctest::Approx(0.9));
}

TEST_CASE("round trip, idempotence, and channel sums") {
  Rng rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = trial % 2 ? 1000 : 640, h = trial % 3 ? 1000 : 480;
    const auto j = testing::random_junction_set(rng, w, h);
    const Tensor t = encode(j, {w, h});
    CHECK(count_positive_cells(t) == j.size());
    const auto back = labels_of(decode(t, {}, {w, h}));
    const auto err = testing::compare_junctions(j, back);
    CHECK(err.position >= 0);
    CHECK(err.position <= 1e-4);
    CHECK(err.angle >= 0);
    CHECK(err.angle <= 1e-3);
    const Tensor again = encode(back, {w, h});
    for (std::size_t k = 0; k < t.size(); ++k) REQUIRE(std::abs(again.data[k] - t.data[k]) <= 1e-5f);
  }
}
