#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "geoforge/dataset.hpp"
#include "geoforge/error.hpp"
#include "geoforge/junction_codec.hpp"
#include "geoforge/tensor.hpp"
#include "json.hpp"

using namespace geoforge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("geoforge_test_" + name);
  fs::remove_all(p);
  return p;
}

json load(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST_CASE("write_coco") {
  dataset::CocoImage im{0, "images/000000.png", 1000, 1000, {{ShapeKind::circle, {50, 50, 100, 100}}}};
  const json doc = dataset::write_coco(std::vector{im});
  CHECK(doc["images"].size() == 1);
  REQUIRE(doc["annotations"].size() == 1);
  const json& a = doc["annotations"][0];
  CHECK(a["category_id"] == 1);
  CHECK(a["area"].get<double>() == 100.0 * 100.0);
  CHECK(a["iscrowd"] == 0);
  CHECK(a["image_id"] == 0);
  REQUIRE(doc["categories"].size() == 7);
  const char* names[] = {"circle", "ellipse", "rectangle", "triangle", "parallelogram", "trapezoid", "text"};
  for (int k = 0; k < 7; ++k) {
    CHECK(doc["categories"][k]["id"] == k + 1);
    CHECK(doc["categories"][k]["name"] == names[k]);
  }
  CHECK(dataset::validate_coco(doc).empty());

  CHECK_THROWS_AS(dataset::write_coco(std::vector{im, im}), Error);

  json broken = doc;
  broken["annotations"][0]["image_id"] = 99;
  CHECK_FALSE(dataset::validate_coco(broken).empty());
  broken = doc;
  broken["categories"].erase(6);
  CHECK_FALSE(dataset::validate_coco(broken).empty());
}

TEST_CASE("junction JSON round trip") {
  const std::vector<JunctionLabel> j{{1.5, 2.25, {0, 90.5}}, {10, 20, {359}}};
  const auto back = dataset::junctions_from_json(json::parse(dataset::junctions_to_json(j).dump()));
  REQUIRE(back.size() == 2);
  CHECK(back[0].label.x == 1.5);
  CHECK(back[0].label.branches == j[0].branches);
  CHECK(back[1].confidence == 1.0);
  CHECK_THROWS_AS(dataset::junctions_from_json(json::object()), FormatError);
}

TEST_CASE("config parsing") {
  const GenConfig c = dataset::parse_config(R"(
# comment
count = 12
seed = 7   # trailing
canvas = 640
text_prob = 0.25
shapes_min = 1
shapes_max = 3
weight.circle = 2.5
)");
  CHECK(c.count == 12);
  CHECK(c.master_seed == 7);
  CHECK(c.canvas_width == 640);
  CHECK(c.canvas_height == 640);
  CHECK(c.text_prob == 0.25);
  CHECK(c.shapes_min == 1);
  CHECK(c.shapes_max == 3);
  CHECK(c.class_weights[0] == 2.5);
  CHECK_THROWS_AS(dataset::parse_config("bogus = 1"), Error);
  CHECK_THROWS_AS(dataset::parse_config("count = many"), Error);
  CHECK_THROWS_AS(dataset::parse_config("count 5"), Error);
}

TEST_CASE("sha256") {
  CHECK(dataset::sha256_hex(std::string_view("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("dataset generation is deterministic and self-consistent") {
  GenConfig c;
  c.count = 10;
  c.master_seed = 42;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const auto ra = dataset::generate_dataset(c, a);
  const auto rb = dataset::generate_dataset(c, b);
  CHECK(ra.manifest_sha256 == rb.manifest_sha256);
  CHECK(ra.manifest_sha256.size() == 64);
  CHECK(dataset::verify_manifest(a).empty());

  for (const char* dir : {"images", "junctions", "boundaries", "targets"}) CHECK(fs::is_directory(a / dir));
  const json coco = load(a / "labels/coco.json");
  CHECK(dataset::validate_coco(coco).empty());
  CHECK(coco["images"].size() == 10);
  CHECK(coco["annotations"].size() == ra.annotations);

  for (long i = 0; i < c.count; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "%06ld", i);
    const auto labels = dataset::junctions_from_json(load(a / "junctions" / (std::string(stem) + ".json")));
    const Tensor t = decode_gjt1(read_file(a / "targets" / (std::string(stem) + ".gjt")));
    const auto decoded = codec::decode(t, {}, {c.canvas_width, c.canvas_height});
    CHECK(decoded.size() <= labels.size());
    for (const auto& d : decoded) {
      const auto it = std::find_if(labels.begin(), labels.end(), [&](const auto& l) {
        return std::hypot(l.label.x - d.label.x, l.label.y - d.label.y) <= 1e-4;
      });
      REQUIRE(it != labels.end());
      for (double br : d.label.branches) {
        const bool found = std::any_of(it->label.branches.begin(), it->label.branches.end(), [&](double g) {
          const double gap = std::fmod(std::abs(g - br), 360.0);
          return std::min(gap, 360.0 - gap) <= 1e-3;
        });
        CHECK(found);
      }
    }
    const GrayImage boundary = read_png(a / "boundaries" / (std::string(stem) + ".png"));
    CHECK(boundary.width == c.canvas_width);
  }

  std::ofstream(a / "junctions/000003.json", std::ios::app) << " ";
  CHECK(dataset::verify_manifest(a).size() == 1);

  GenConfig other = c;
  other.master_seed = 43;
  CHECK(dataset::generate_dataset(other, scratch("det_c")).manifest_sha256 != ra.manifest_sha256);
  for (const auto& p : {a, b, scratch("det_c")}) fs::remove_all(p);
}

TEST_CASE("text_prob 0 writes no text annotations") {
  GenConfig c;
  c.count = 10;
  c.text_prob = 0.0;
  const fs::path dir = scratch("notext");
  dataset::generate_dataset(c, dir);
  for (const auto& a : load(dir / "labels/coco.json")["annotations"]) CHECK(a["category_id"] != 7);
  fs::remove_all(dir);
}

TEST_CASE("placement failures carry the image index") {
  GenConfig c;
  c.count = 3;
  c.canvas_width = c.canvas_height = 6;
  const fs::path dir = scratch("tiny");
  try {
    dataset::generate_dataset(c, dir);
    FAIL("expected PlacementError");
  } catch (const PlacementError& e) {
    CHECK(e.image_index() >= 0);
    CHECK(e.image_index() < 3);
  }
  fs::remove_all(dir);
}
