#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "geoforge/dataset.hpp"
#include "geoforge/error.hpp"
#include "geoforge/junction_codec.hpp"
#include "geoforge/losses.hpp"
#include "geoforge/metrics.hpp"
#include "geoforge/tensor.hpp"

namespace geoforge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json read_json(const fs::path& p) {
  const auto bytes = read_file(p);
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

// Pairs of files sharing a name when both paths are directories, else the pair itself.
std::vector<std::pair<fs::path, fs::path>> file_pairs(const fs::path& pred, const fs::path& gt,
                                                      const std::string& ext) {
  if (!fs::is_directory(gt)) return {{pred, gt}};
  if (!fs::is_directory(pred)) throw Error("--gt is a directory, so --pred must be one too");
  std::vector<std::pair<fs::path, fs::path>> out;
  for (const auto& e : fs::directory_iterator(gt))
    if (e.path().extension() == ext) out.emplace_back(pred / e.path().filename(), e.path());
  std::sort(out.begin(), out.end());
  return out;
}

void emit(std::ostream& out, const std::string& task, const std::vector<std::pair<std::string, double>>& rows,
          const json& doc, const std::string& json_path) {
  out << "task: " << task << "\n";
  for (const auto& [k, v] : rows) out << k << ": " << fmt(v) << "\n";
  if (!json_path.empty()) {
    std::ofstream f(json_path);
    if (!f) throw Error("cannot write " + json_path);
    f << doc.dump(2) << "\n";
  }
}

int cmd_gen(const GenConfig& cfg, const fs::path& out_dir, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = dataset::generate_dataset(cfg, out_dir);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << "images: " << cfg.count << "\n"
      << "annotations: " << res.annotations << "\n"
      << "junctions: " << res.junctions << "\n"
      << "manifest_sha256: " << res.manifest_sha256 << "\n"
      << "seconds: " << secs << "\n";
  return 0;
}

int cmd_encode(const fs::path& junctions, int w, int h, const fs::path& out_path, std::ostream& out) {
  const auto scored = dataset::junctions_from_json(read_json(junctions));
  std::vector<JunctionLabel> labels;
  for (const auto& s : scored) labels.push_back(s.label);
  const Tensor grid = codec::encode(labels, {w, h});
  write_file(out_path, encode_gjt1(grid));
  out << "junctions: " << labels.size() << "\n"
      << "encoded_cells: " << codec::count_positive_cells(grid) << "\n";
  return 0;
}

struct EvalOptions {
  std::string task;
  fs::path pred, gt;
  double iou = 0.5;
  double d_tol = -1.0;
  double ang_tol = metrics::kDefaultAngleTolDeg;
  std::vector<int> canvas{1000, 1000};
  double bin_thr = 0.5;
  double match_tol = 2.0;
  std::string json_out;
};

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  if (o.task == "det") {
    const auto gt = dataset::coco_ground_truth(read_json(o.gt));
    const auto pred = dataset::coco_results(read_json(o.pred));
    const auto rep = metrics::mean_average_precision(pred, gt, o.iou);
    std::vector<std::pair<std::string, double>> rows{{"mAP", rep.map}};
    json doc{{"task", "det"}, {"iou_threshold", o.iou}, {"mAP", rep.map}, {"per_class", json::object()}};
    for (const auto& [cls, ap] : rep.per_class) {
      const std::string name(to_string(static_cast<ShapeKind>(std::clamp(cls - 1, 0, kNumClasses - 1))));
      rows.emplace_back("AP[" + std::to_string(cls) + ":" + name + "]", ap);
      doc["per_class"][std::to_string(cls)] = ap;
    }
    emit(out, "det", rows, doc, o.json_out);
    return 0;
  }
  if (o.task == "junction") {
    const double d_tol = o.d_tol > 0 ? o.d_tol : metrics::default_distance_tol(o.canvas[0], o.canvas[1]);
    std::size_t n_pred = 0, n_gt = 0, matched = 0, mb = 0, gb = 0;
    const auto pairs = file_pairs(o.pred, o.gt, ".json");
    for (const auto& [pp, gp] : pairs) {
      const auto pred = fs::exists(pp) ? dataset::junctions_from_json(read_json(pp)) : std::vector<metrics::ScoredJunction>{};
      std::vector<JunctionLabel> gt;
      for (auto& s : dataset::junctions_from_json(read_json(gp))) gt.push_back(std::move(s.label));
      const auto s = metrics::junction_score(pred, gt, d_tol, o.ang_tol);
      n_pred += pred.size();
      n_gt += gt.size();
      matched += s.matched;
      mb += s.matched_branches;
      gb += s.gt_branches;
    }
    const double p = n_pred ? double(matched) / n_pred : (n_gt ? 0.0 : 1.0);
    const double r = n_gt ? double(matched) / n_gt : (n_pred ? 0.0 : 1.0);
    const double f1 = metrics::f1_score(p, r);
    const double ba = gb ? double(mb) / gb : (n_pred || n_gt ? 0.0 : 1.0);
    json doc{{"task", "junction"}, {"files", pairs.size()}, {"d_tol", d_tol}, {"ang_tol", o.ang_tol},
             {"precision", p},     {"recall", r},           {"f1", f1},        {"branch_accuracy", ba}};
    emit(out, "junction", {{"precision", p}, {"recall", r}, {"f1", f1}, {"branch_accuracy", ba}}, doc, o.json_out);
    return 0;
  }
  if (o.task == "boundary") {
    std::size_t pp_n = 0, pm = 0, gp_n = 0, gm = 0;
    const auto pairs = file_pairs(o.pred, o.gt, ".png");
    for (const auto& [pp, gp] : pairs) {
      const BoundaryMap gt = from_gray(read_png(gp));
      const BoundaryMap pred = fs::exists(pp) ? from_gray(read_png(pp))
                                              : BoundaryMap{gt.width, gt.height, std::vector<float>(gt.values.size())};
      const auto s = metrics::boundary_score(pred, gt, o.bin_thr, o.match_tol);
      pp_n += s.pred_pixels;
      pm += s.pred_matched;
      gp_n += s.gt_pixels;
      gm += s.gt_matched;
    }
    double p = pp_n ? double(pm) / pp_n : 0.0, r = gp_n ? double(gm) / gp_n : 0.0;
    if (pp_n == 0 && gp_n == 0) p = r = 1.0;
    const double f1 = (pp_n == 0 && gp_n == 0) ? 1.0 : metrics::f1_score(p, r);
    json doc{{"task", "boundary"}, {"files", pairs.size()}, {"bin_thr", o.bin_thr}, {"match_tol", o.match_tol},
             {"precision", p},     {"recall", r},           {"f1", f1}};
    emit(out, "boundary", {{"precision", p}, {"recall", r}, {"f1", f1}}, doc, o.json_out);
    return 0;
  }
  throw Error("unknown eval task '" + o.task + "'");
}

struct OracleOptions {
  std::string task;
  fs::path pred, target;
  long rpn_count = -1;
  bool as_json = false;
};

int cmd_loss_oracle(const OracleOptions& o, std::ostream& out) {
  loss::LossReport rep;
  if (o.task == "junction") {
    const Tensor pred = read_tensor_file(o.pred);
    const Tensor target = read_tensor_file(o.target);
    rep = loss::junction_loss(pred, target);
  } else if (o.task == "boundary") {
    const Tensor pred = read_tensor_file(o.pred);
    const Tensor target = read_tensor_file(o.target);
    if (pred.size() != target.size()) throw ShapeMismatch("boundary: pred and target sizes differ");
    rep.total = loss::boundary_loss(pred.data, target.data);
    rep.components["l_bodr"] = rep.total;
  } else if (o.task == "det") {
    const auto pred = decode_raw_floats(read_file(o.pred));
    const auto target = decode_raw_floats(read_file(o.target));
    if (pred.size() != target.size() || pred.size() % 5 != 0)
      throw ShapeMismatch("det: files must hold the same number of 5-float rows");
    const std::size_t rows = pred.size() / 5;
    if (o.rpn_count < 0 || static_cast<std::size_t>(o.rpn_count) > rows)
      throw Error("det: --rpn-count must be given and not exceed the row count");
    std::vector<float> scores, labels, deltas, targets;
    for (std::size_t r = 0; r < rows; ++r) {
      scores.push_back(pred[5 * r]);
      labels.push_back(target[5 * r]);
      deltas.insert(deltas.end(), pred.begin() + 5 * r + 1, pred.begin() + 5 * r + 5);
      targets.insert(targets.end(), target.begin() + 5 * r + 1, target.begin() + 5 * r + 5);
    }
    const auto n = static_cast<std::size_t>(o.rpn_count);
    const std::span<const float> s(scores), l(labels), d(deltas), t(targets);
    rep = loss::detection_loss({s.first(n), l.first(n), d.first(4 * n), t.first(4 * n), s.subspan(n), l.subspan(n),
                                d.subspan(4 * n), t.subspan(4 * n)});
  } else if (o.task == "vis") {
    const auto v = decode_raw_floats(read_file(o.pred));
    if (v.size() != 3) throw ShapeMismatch("vis: expected 3 floats (l_det, l_junc, l_bodr)");
    rep.total = loss::total_visual_loss(v[0], v[1], v[2]);
    rep.components = {{"l_det", v[0]}, {"l_junc", v[1]}, {"l_bodr", v[2]}, {"l_vis", rep.total}};
  } else {
    throw Error("unknown loss-oracle task '" + o.task + "'");
  }

  if (o.as_json) {
    json doc{{"task", o.task}, {"total", rep.total}, {"components", rep.components}};
    out << doc.dump(2) << "\n";
  } else {
    out << "task: " << o.task << "\n";
    for (const auto& [k, v] : rep.components) out << k << ": " << fmt(v) << "\n";
    out << "total: " << fmt(rep.total) << "\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"geoforge: synthetic geometry data engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dataset::tool_version()));

  // gen
  GenConfig cfg;
  std::string config_path, out_dir;
  int canvas = 0;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("--config", config_path, "key = value config file");
  auto* o_count = gen->add_option("--count", cfg.count, "number of images");
  auto* o_seed = gen->add_option("--seed", cfg.master_seed, "master seed");
  auto* o_canvas = gen->add_option("--canvas", canvas, "square canvas size in px");
  auto* o_tp = gen->add_option("--text-prob", cfg.text_prob, "probability of attaching text to a shape");
  auto* o_smin = gen->add_option("--shapes-min", cfg.shapes_min, "minimum shapes per image");
  auto* o_smax = gen->add_option("--shapes-max", cfg.shapes_max, "maximum shapes per image");
  gen->add_option("--out", out_dir, "output directory")->required();

  // encode
  std::string enc_in, enc_out;
  std::vector<int> enc_canvas{1000, 1000};
  auto* enc = app.add_subcommand("encode", "Encode a junction JSON file into a GJT1 target");
  enc->add_option("--junctions", enc_in)->required()->check(CLI::ExistingFile);
  enc->add_option("--canvas", enc_canvas, "canvas width and height")->expected(2);
  enc->add_option("--out", enc_out)->required();

  // eval
  EvalOptions eo;
  auto* ev = app.add_subcommand("eval", "Score predictions against ground truth");
  ev->add_option("--task", eo.task)->required()->check(CLI::IsMember({"det", "junction", "boundary"}));
  ev->add_option("--pred", eo.pred)->required()->check(CLI::ExistingPath);
  ev->add_option("--gt", eo.gt)->required()->check(CLI::ExistingPath);
  ev->add_option("--iou", eo.iou, "IoU threshold for det");
  ev->add_option("--d-tol", eo.d_tol, "junction distance tolerance in px (default 1% of the diagonal)");
  ev->add_option("--ang-tol", eo.ang_tol, "branch angle tolerance in degrees");
  ev->add_option("--canvas", eo.canvas, "canvas width and height for junction defaults")->expected(2);
  ev->add_option("--bin-thr", eo.bin_thr, "boundary binarization threshold");
  ev->add_option("--match-tol", eo.match_tol, "boundary match tolerance in px");
  ev->add_option("--json", eo.json_out, "also write the report as JSON");

  // loss-oracle
  OracleOptions lo;
  auto* lor = app.add_subcommand("loss-oracle", "Evaluate a loss on tensors read from files");
  lor->add_option("--task", lo.task)->required()->check(CLI::IsMember({"junction", "boundary", "det", "vis"}));
  lor->add_option("--pred", lo.pred)->required()->check(CLI::ExistingFile);
  lor->add_option("--target", lo.target)->check(CLI::ExistingFile);
  lor->add_option("--rpn-count", lo.rpn_count, "det: number of leading rows that are RPN anchors");
  lor->add_flag("--json", lo.as_json, "print the report as JSON");

  // verify
  std::string verify_dir;
  auto* ver = app.add_subcommand("verify", "Re-hash a generated dataset against its manifest");
  ver->add_option("dir", verify_dir)->required()->check(CLI::ExistingDirectory);

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen) {
      GenConfig base;
      if (!config_path.empty()) base = dataset::load_config(config_path);
      // Flags given on the command line override the config file.
      if (!*o_count) cfg.count = base.count;
      if (!*o_seed) cfg.master_seed = base.master_seed;
      if (!*o_tp) cfg.text_prob = base.text_prob;
      if (!*o_smin) cfg.shapes_min = base.shapes_min;
      if (!*o_smax) cfg.shapes_max = base.shapes_max;
      cfg.canvas_width = *o_canvas ? canvas : base.canvas_width;
      cfg.canvas_height = *o_canvas ? canvas : base.canvas_height;
      cfg.class_weights = base.class_weights;
      cfg.stroke_px = base.stroke_px;
      cfg.boundary_sigma = base.boundary_sigma;
      return cmd_gen(cfg, out_dir, out);
    }
    if (*enc) return cmd_encode(enc_in, enc_canvas[0], enc_canvas[1], enc_out, out);
    if (*ev) return cmd_eval(eo, out);
    if (*lor) {
      if (lo.task != "vis" && lo.target.empty()) throw Error("--target is required for task " + lo.task);
      return cmd_loss_oracle(lo, out);
    }
    if (*ver) {
      const auto problems = dataset::verify_manifest(verify_dir);
      for (const auto& p : problems) err << p << "\n";
      out << (problems.empty() ? "ok" : "FAILED") << "\n";
      return problems.empty() ? 0 : 1;
    }
  } catch (const PlacementError& e) {
    err << "error: " << e.what() << " (image " << e.image_index() << ")\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace geoforge::cli
