#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "geoforge/annotate.hpp"
#include "geoforge/metrics.hpp"
#include "geoforge/scene.hpp"

namespace geoforge::dataset {

std::string_view tool_version();

// ---------------------------------------------------------------------------
// COCO

struct CocoAnnotation {
  ShapeKind kind = ShapeKind::circle;
  BBox bbox;
};

struct CocoImage {
  long id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;
  std::vector<CocoAnnotation> annotations;
};

std::vector<CocoAnnotation> annotations_for(const Scene& scene);

/// COCO-style document with `images`, `annotations` (ids from 1 in image
/// order, iscrowd 0, area = w * h) and the seven `categories`.
/// Throws Error on duplicate image ids.
nlohmann::json write_coco(std::span<const CocoImage> images);

nlohmann::json coco_categories();

// Empty when the document satisfies the documented schema, otherwise one
// message per violation (the first 20 at most).
std::vector<std::string> validate_coco(const nlohmann::json& doc);

std::vector<metrics::Detection> coco_ground_truth(const nlohmann::json& doc);
// COCO results array: [{image_id, category_id, bbox, score}, ...]
std::vector<metrics::Detection> coco_results(const nlohmann::json& doc);

// ---------------------------------------------------------------------------
// Junction files: JSON array of {"x", "y", "branches": [deg, ...]} records,
// with an optional "confidence" on predictions.

nlohmann::json junctions_to_json(std::span<const JunctionLabel> junctions);
std::vector<metrics::ScoredJunction> junctions_from_json(const nlohmann::json& doc);

// ---------------------------------------------------------------------------
// Config file: one `key = value` per line, '#' starts a comment.
// Keys: count, canvas (square), canvas_width, canvas_height, shapes_min,
// shapes_max, text_prob, master_seed (alias seed), stroke_px, boundary_sigma,
// weight.<kind> for the six geometric kinds.

GenConfig parse_config(std::string_view text, GenConfig base = {});
GenConfig load_config(const std::filesystem::path& path, GenConfig base = {});
nlohmann::json config_to_json(const GenConfig& config);

// ---------------------------------------------------------------------------

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

struct GenerateResult {
  nlohmann::json manifest;
  std::string manifest_sha256;  // hash of manifest.json as written
  std::size_t annotations = 0;
  std::size_t junctions = 0;
};

/// Generates a full dataset under out_dir:
///   images/NNNNNN.png, labels/coco.json, junctions/NNNNNN.json,
///   boundaries/NNNNNN.png, targets/NNNNNN.gjt, manifest.json
/// Images are produced in parallel; every output byte is a function of the
/// config alone. Placement failures are rethrown as PlacementError carrying
/// the image index.
GenerateResult generate_dataset(const GenConfig& config, const std::filesystem::path& out_dir);

/// Re-hashes every file listed in a manifest. Returns one message per
/// missing or mismatching file; empty when the dataset verifies.
std::vector<std::string> verify_manifest(const std::filesystem::path& dataset_dir);

}  // namespace geoforge::dataset
