#include "geoforge/dataset.hpp"

#include <cstdio>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "geoforge/error.hpp"
#include "geoforge/junction_codec.hpp"
#include "geoforge/render.hpp"
#include "geoforge/tensor.hpp"

#ifndef GEOFORGE_VERSION
#define GEOFORGE_VERSION "dev"
#endif

namespace geoforge::dataset {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view tool_version() { return GEOFORGE_VERSION; }

// ---------------------------------------------------------------------------

std::vector<CocoAnnotation> annotations_for(const Scene& scene) {
  std::vector<CocoAnnotation> out;
  out.reserve(scene.shapes.size());
  for (const ShapeSpec& s : scene.shapes) out.push_back({s.kind, shape_bbox(s)});
  return out;
}

json coco_categories() {
  json cats = json::array();
  for (int k = 0; k < kNumClasses; ++k) {
    const auto kind = static_cast<ShapeKind>(k);
    cats.push_back({{"id", category_id(kind)}, {"name", std::string(to_string(kind))}, {"supercategory", "shape"}});
  }
  return cats;
}

json write_coco(std::span<const CocoImage> images) {
  json doc;
  doc["info"] = {{"description", "geoforge synthetic geometry"}, {"version", std::string(tool_version())}};
  doc["images"] = json::array();
  doc["annotations"] = json::array();
  doc["categories"] = coco_categories();
  std::set<long> seen;
  long next_ann = 1;
  for (const CocoImage& img : images) {
    if (!seen.insert(img.id).second) throw Error("write_coco: duplicate image id " + std::to_string(img.id));
    doc["images"].push_back(
        {{"id", img.id}, {"file_name", img.file_name}, {"width", img.width}, {"height", img.height}});
    for (const CocoAnnotation& a : img.annotations) {
      doc["annotations"].push_back({{"id", next_ann++},
                                    {"image_id", img.id},
                                    {"category_id", category_id(a.kind)},
                                    {"bbox", {a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h}},
                                    {"area", a.bbox.w * a.bbox.h},
                                    {"iscrowd", 0}});
    }
  }
  return doc;
}

std::vector<std::string> validate_coco(const json& doc) {
  std::vector<std::string> errs;
  const auto fail = [&](std::string msg) {
    if (errs.size() < 20) errs.push_back(std::move(msg));
  };
  if (!doc.is_object()) return {"document is not an object"};
  for (const char* key : {"images", "annotations", "categories"})
    if (!doc.contains(key) || !doc[key].is_array()) fail(std::string("missing array: ") + key);
  if (!errs.empty()) return errs;

  std::set<long> cat_ids;
  for (const auto& c : doc["categories"]) {
    if (!c.is_object() || !c.contains("id") || !c["id"].is_number_integer() || !c.contains("name") ||
        !c["name"].is_string()) {
      fail("category entry lacks integer id or string name");
      continue;
    }
    cat_ids.insert(c["id"].get<long>());
  }
  if (doc["categories"].size() != kNumClasses) fail("expected 7 categories");
  for (int k = 1; k <= kNumClasses; ++k)
    if (!cat_ids.count(k)) fail("missing category id " + std::to_string(k));

  std::map<long, std::pair<double, double>> sizes;
  for (const auto& im : doc["images"]) {
    if (!im.is_object() || !im.contains("id") || !im["id"].is_number_integer() || !im.contains("file_name") ||
        !im["file_name"].is_string() || !im.contains("width") || !im["width"].is_number_integer() ||
        !im.contains("height") || !im["height"].is_number_integer()) {
      fail("image entry lacks id/file_name/width/height");
      continue;
    }
    if (!sizes.emplace(im["id"].get<long>(), std::pair{im["width"].get<double>(), im["height"].get<double>()}).second)
      fail("duplicate image id " + im["id"].dump());
  }

  std::set<long> ann_ids;
  for (const auto& a : doc["annotations"]) {
    const bool shaped = a.is_object() && a.contains("id") && a["id"].is_number_integer() && a.contains("image_id") &&
                        a["image_id"].is_number_integer() && a.contains("category_id") &&
                        a["category_id"].is_number_integer() && a.contains("bbox") && a["bbox"].is_array() &&
                        a["bbox"].size() == 4 && a.contains("area") && a["area"].is_number() &&
                        a.contains("iscrowd") && a["iscrowd"].is_number_integer();
    if (!shaped) {
      fail("annotation entry lacks id/image_id/category_id/bbox[4]/area/iscrowd");
      continue;
    }
    const long id = a["id"].get<long>();
    if (!ann_ids.insert(id).second) fail("duplicate annotation id " + std::to_string(id));
    const auto img = sizes.find(a["image_id"].get<long>());
    if (img == sizes.end()) {
      fail("annotation " + std::to_string(id) + " references an unknown image");
      continue;
    }
    if (!cat_ids.count(a["category_id"].get<long>())) fail("annotation " + std::to_string(id) + " has unknown category");
    const auto b = a["bbox"].get<std::vector<double>>();
    if (!(b[2] > 0 && b[3] > 0)) fail("annotation " + std::to_string(id) + " has an empty box");
    if (b[0] < 0 || b[1] < 0 || b[0] + b[2] > img->second.first || b[1] + b[3] > img->second.second)
      fail("annotation " + std::to_string(id) + " box leaves the image");
    if (std::fabs(a["area"].get<double>() - b[2] * b[3]) > 1e-9 * std::max(1.0, b[2] * b[3]))
      fail("annotation " + std::to_string(id) + " area != w*h");
    if (a["iscrowd"].get<int>() != 0) fail("annotation " + std::to_string(id) + " has iscrowd != 0");
  }
  return errs;
}

namespace {

metrics::Detection detection_from(const json& a, bool scored) {
  metrics::Detection d;
  d.image_id = a.at("image_id").get<long>();
  d.category_id = a.at("category_id").get<int>();
  const auto b = a.at("bbox").get<std::vector<double>>();
  if (b.size() != 4) throw FormatError("bbox must have 4 entries");
  d.box = {b[0], b[1], b[2], b[3]};
  d.score = scored ? a.at("score").get<double>() : 1.0;
  return d;
}

}  // namespace

std::vector<metrics::Detection> coco_ground_truth(const json& doc) {
  std::vector<metrics::Detection> out;
  for (const auto& a : doc.at("annotations")) out.push_back(detection_from(a, false));
  return out;
}

std::vector<metrics::Detection> coco_results(const json& doc) {
  const json& arr = doc.is_object() && doc.contains("annotations") ? doc["annotations"] : doc;
  if (!arr.is_array()) throw FormatError("detection results must be a JSON array");
  std::vector<metrics::Detection> out;
  for (const auto& a : arr) out.push_back(detection_from(a, true));
  return out;
}

// ---------------------------------------------------------------------------

json junctions_to_json(std::span<const JunctionLabel> junctions) {
  json arr = json::array();
  for (const JunctionLabel& j : junctions) arr.push_back({{"x", j.x}, {"y", j.y}, {"branches", j.branches}});
  return arr;
}

std::vector<metrics::ScoredJunction> junctions_from_json(const json& doc) {
  if (!doc.is_array()) throw FormatError("junction file must hold a JSON array");
  std::vector<metrics::ScoredJunction> out;
  for (const auto& r : doc) {
    metrics::ScoredJunction s;
    s.label.x = r.at("x").get<double>();
    s.label.y = r.at("y").get<double>();
    s.label.branches = r.value("branches", std::vector<double>{});
    s.confidence = r.value("confidence", 1.0);
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------

GenConfig parse_config(std::string_view text, GenConfig c) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "count") c.count = std::stol(value);
      else if (key == "canvas") c.canvas_width = c.canvas_height = std::stoi(value);
      else if (key == "canvas_width") c.canvas_width = std::stoi(value);
      else if (key == "canvas_height") c.canvas_height = std::stoi(value);
      else if (key == "shapes_min") c.shapes_min = std::stoi(value);
      else if (key == "shapes_max") c.shapes_max = std::stoi(value);
      else if (key == "text_prob") c.text_prob = std::stod(value);
      else if (key == "master_seed" || key == "seed") c.master_seed = std::stoull(value);
      else if (key == "stroke_px") c.stroke_px = std::stoi(value);
      else if (key == "boundary_sigma") c.boundary_sigma = std::stod(value);
      else if (key.rfind("weight.", 0) == 0) {
        const ShapeKind kind = shape_kind_from_string(key.substr(7));
        if (kind == ShapeKind::text) throw Error("text frequency is set by text_prob");
        c.class_weights[static_cast<std::size_t>(kind)] = std::stod(value);
      } else {
        throw Error("unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw Error("config line " + std::to_string(lineno) + ": bad value for '" + key + "'");
    } catch (const Error& e) {
      throw Error("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

GenConfig load_config(const fs::path& path, GenConfig base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

json config_to_json(const GenConfig& c) {
  json weights;
  for (int k = 0; k < kNumGeometricKinds; ++k)
    weights[std::string(to_string(static_cast<ShapeKind>(k)))] = c.class_weights[k];
  return {{"count", c.count},
          {"canvas_width", c.canvas_width},
          {"canvas_height", c.canvas_height},
          {"shapes_min", c.shapes_min},
          {"shapes_max", c.shapes_max},
          {"text_prob", c.text_prob},
          {"class_weights", weights},
          {"master_seed", c.master_seed},
          {"stroke_px", c.stroke_px},
          {"boundary_sigma", c.boundary_sigma}};
}

// ---------------------------------------------------------------------------

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

std::string sha256_hex(std::string_view text) {
  return sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

namespace {

struct ImageOutcome {
  std::vector<CocoAnnotation> annotations;
  json record;
  std::size_t junctions = 0;
  std::exception_ptr error;
};

std::string stem(long index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06ld", index);
  return buf;
}

std::span<const std::uint8_t> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string write_hashed(const fs::path& root, const std::string& rel, std::span<const std::uint8_t> bytes) {
  write_file(root / rel, bytes);
  return sha256_hex(bytes);
}

ImageOutcome produce_image(const GenConfig& config, long index, const fs::path& root) {
  ImageOutcome out;
  const Scene scene = sample_scene(config, index);
  out.annotations = annotations_for(scene);
  const std::string name = stem(index);

  const std::string image_rel = "images/" + name + ".png";
  const std::string image_hash = write_hashed(root, image_rel, encode_png(render_scene(scene, config.stroke_px)));

  const std::vector<JunctionLabel> junctions = extract_junctions(scene);
  out.junctions = junctions.size();
  const std::string junction_rel = "junctions/" + name + ".json";
  const std::string junction_hash = write_hashed(root, junction_rel, as_bytes(junctions_to_json(junctions).dump() + "\n"));

  const std::string target_rel = "targets/" + name + ".gjt";
  const std::string target_hash =
      write_hashed(root, target_rel, encode_gjt1(codec::encode(junctions, {scene.width, scene.height})));

  const std::string boundary_rel = "boundaries/" + name + ".png";
  const std::string boundary_hash = write_hashed(
      root, boundary_rel, encode_png(to_gray(boundary_heatmap(scene, config.stroke_px, config.boundary_sigma))));

  out.record = {{"id", index},
                {"image", {{"file", image_rel}, {"sha256", image_hash}}},
                {"junctions", {{"file", junction_rel}, {"sha256", junction_hash}, {"count", junctions.size()}}},
                {"target", {{"file", target_rel}, {"sha256", target_hash}}},
                {"boundary", {{"file", boundary_rel}, {"sha256", boundary_hash}}},
                {"annotations", out.annotations.size()}};
  return out;
}

}  // namespace

GenerateResult generate_dataset(const GenConfig& config, const fs::path& out_dir) {
  validate(config);
  for (const char* sub : {"images", "labels", "junctions", "boundaries", "targets"})
    fs::create_directories(out_dir / sub);

  const long n = config.count;
  std::vector<ImageOutcome> outcomes(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) {
    try {
      outcomes[static_cast<std::size_t>(i)] = produce_image(config, i, out_dir);
    } catch (...) {
      outcomes[static_cast<std::size_t>(i)].error = std::current_exception();
    }
  }

  GenerateResult result;
  std::vector<CocoImage> coco_images;
  coco_images.reserve(outcomes.size());
  json records = json::array();
  for (long i = 0; i < n; ++i) {
    ImageOutcome& o = outcomes[static_cast<std::size_t>(i)];
    if (o.error) {
      try {
        std::rethrow_exception(o.error);
      } catch (const PlacementError&) {
        throw;
      } catch (const std::exception& e) {
        throw Error("image " + std::to_string(i) + ": " + e.what());
      }
    }
    result.annotations += o.annotations.size();
    result.junctions += o.junctions;
    coco_images.push_back({i, "images/" + stem(i) + ".png", config.canvas_width, config.canvas_height,
                           std::move(o.annotations)});
    records.push_back(std::move(o.record));
  }

  const std::string coco_text = write_coco(coco_images).dump() + "\n";
  const std::string coco_hash = write_hashed(out_dir, "labels/coco.json", as_bytes(coco_text));

  json& m = result.manifest;
  m["tool"] = "geoforge";
  m["tool_version"] = std::string(tool_version());
  m["config"] = config_to_json(config);
  m["master_seed"] = config.master_seed;
  m["hash"] = "sha256";
  m["coco"] = {{"file", "labels/coco.json"}, {"sha256", coco_hash}};
  m["counts"] = {{"images", n}, {"annotations", result.annotations}, {"junctions", result.junctions}};
  m["images"] = std::move(records);

  const std::string manifest_text = m.dump(1) + "\n";
  write_file(out_dir / "manifest.json", as_bytes(manifest_text));
  result.manifest_sha256 = sha256_hex(manifest_text);
  return result;
}

std::vector<std::string> verify_manifest(const fs::path& dir) {
  std::vector<std::string> problems;
  const auto bytes = read_file(dir / "manifest.json");
  const json m = json::parse(bytes.begin(), bytes.end());
  const auto check = [&](const json& entry) {
    const fs::path p = dir / entry.at("file").get<std::string>();
    if (!fs::exists(p)) {
      problems.push_back("missing " + p.string());
      return;
    }
    if (sha256_hex(read_file(p)) != entry.at("sha256").get<std::string>()) problems.push_back("hash mismatch " + p.string());
  };
  check(m.at("coco"));
  for (const auto& rec : m.at("images"))
    for (const char* key : {"image", "junctions", "target", "boundary"}) check(rec.at(key));
  return problems;
}

}  // namespace geoforge::dataset
