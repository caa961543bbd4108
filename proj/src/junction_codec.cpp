#include "geoforge/junction_codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "geoforge/error.hpp"

namespace geoforge::codec {

namespace {

std::size_t cell_offset(std::size_t row, std::size_t col) { return (row * kGridCols + col) * kChannels; }

}  // namespace

Tensor empty_grid() { return Tensor({kGridRows, kGridCols, kChannels}); }

void require_grid_shape(const Tensor& t) {
  if (t.shape != std::vector<std::size_t>{kGridRows, kGridCols, kChannels} || t.size() != kGridRows * kGridCols * kChannels)
    throw ShapeMismatch("junction grid must be 60x60x33, got " + shape_string(t.shape));
}

BinAssignment assign_bin(double theta_deg) {
  const double theta = normalize_deg(theta_deg);
  const auto bin = std::min<std::size_t>(kBins - 1, static_cast<std::size_t>(std::floor(theta / kBinWidthDeg)));
  return {bin, (theta - bin_center_deg(bin)) / kBinWidthDeg};
}

double bin_center_deg(std::size_t bin) { return kBinWidthDeg * static_cast<double>(bin) + kBinWidthDeg / 2; }

Tensor encode(std::span<const JunctionLabel> junctions, Canvas canvas) {
  if (canvas.width < 1 || canvas.height < 1) throw Error("encode: canvas must be at least 1x1");
  const double cw = static_cast<double>(canvas.width) / kGridCols;
  const double ch = static_cast<double>(canvas.height) / kGridRows;

  std::vector<std::ptrdiff_t> owner(kGridRows * kGridCols, -1);
  std::vector<double> owner_dist(kGridRows * kGridCols, std::numeric_limits<double>::infinity());
  struct Placed {
    std::size_t row, col;
    double dx, dy;
  };
  std::vector<Placed> placed(junctions.size());

  for (std::size_t i = 0; i < junctions.size(); ++i) {
    const JunctionLabel& j = junctions[i];
    if (!(j.x >= 0.0 && j.x < canvas.width && j.y >= 0.0 && j.y < canvas.height))
      throw Error("encode: junction (" + std::to_string(j.x) + ", " + std::to_string(j.y) + ") lies outside the canvas");
    const auto col = std::min<std::size_t>(kGridCols - 1, static_cast<std::size_t>(std::floor(j.x / cw)));
    const auto row = std::min<std::size_t>(kGridRows - 1, static_cast<std::size_t>(std::floor(j.y / ch)));
    const double dx = j.x / cw - (static_cast<double>(col) + 0.5);
    const double dy = j.y / ch - (static_cast<double>(row) + 0.5);
    placed[i] = {row, col, dx, dy};
    const std::size_t cell = row * kGridCols + col;
    const double d = std::hypot(dx, dy);
    if (d < owner_dist[cell]) {
      owner_dist[cell] = d;
      owner[cell] = static_cast<std::ptrdiff_t>(i);
    }
  }

  Tensor grid = empty_grid();
  for (std::size_t cell = 0; cell < owner.size(); ++cell) {
    if (owner[cell] < 0) continue;
    const auto i = static_cast<std::size_t>(owner[cell]);
    const Placed& p = placed[i];
    float* v = grid.data.data() + cell_offset(p.row, p.col);
    v[kCellConf] = 1.0f;
    v[kDx] = static_cast<float>(p.dx);
    v[kDy] = static_cast<float>(p.dy);
    std::vector<double> best(kBins, std::numeric_limits<double>::infinity());
    for (double theta : junctions[i].branches) {
      const BinAssignment b = assign_bin(theta);
      if (std::fabs(b.residual) < best[b.bin]) {
        best[b.bin] = std::fabs(b.residual);
        v[kBinConf + b.bin] = 1.0f;
        v[kBinResidual + b.bin] = static_cast<float>(b.residual);
      }
    }
  }
  return grid;
}

std::vector<DecodedJunction> decode(const Tensor& pred, const DecodeThresholds& thresholds, Canvas canvas) {
  require_grid_shape(pred);
  if (!(thresholds.cell_conf_min > 0.0 && thresholds.cell_conf_min < 1.0 && thresholds.bin_conf_min > 0.0 &&
        thresholds.bin_conf_min < 1.0))
    throw Error("decode thresholds must lie in (0, 1)");
  const double cw = static_cast<double>(canvas.width) / kGridCols;
  const double ch = static_cast<double>(canvas.height) / kGridRows;

  std::vector<DecodedJunction> out;
  for (std::size_t row = 0; row < kGridRows; ++row) {
    for (std::size_t col = 0; col < kGridCols; ++col) {
      const float* v = pred.data.data() + cell_offset(row, col);
      if (!(v[kCellConf] >= thresholds.cell_conf_min)) continue;
      DecodedJunction d;
      d.confidence = v[kCellConf];
      d.label.x = (static_cast<double>(col) + 0.5 + v[kDx]) * cw;
      d.label.y = (static_cast<double>(row) + 0.5 + v[kDy]) * ch;
      for (std::size_t k = 0; k < kBins; ++k)
        if (v[kBinConf + k] >= thresholds.bin_conf_min)
          d.label.branches.push_back(normalize_deg(bin_center_deg(k) + v[kBinResidual + k] * kBinWidthDeg));
      std::sort(d.label.branches.begin(), d.label.branches.end());
      d.branchless = d.label.branches.empty();
      out.push_back(std::move(d));
    }
  }
  return out;
}

std::size_t count_positive_cells(const Tensor& grid) {
  require_grid_shape(grid);
  std::size_t n = 0;
  for (std::size_t cell = 0; cell < kGridRows * kGridCols; ++cell)
    if (grid.data[cell * kChannels + kCellConf] > 0.5f) ++n;
  return n;
}

}  // namespace geoforge::codec
