#pragma once

#include <span>
#include <vector>

#include "geoforge/annotate.hpp"
#include "geoforge/tensor.hpp"

namespace geoforge::codec {

inline constexpr std::size_t kGridRows = 60;
inline constexpr std::size_t kGridCols = 60;
inline constexpr std::size_t kBins = 15;
inline constexpr double kBinWidthDeg = 24.0;
static_assert(kBins * kBinWidthDeg == 360.0);

// Channel layout of a grid cell.
inline constexpr std::size_t kCellConf = 0;
inline constexpr std::size_t kDx = 1;
inline constexpr std::size_t kDy = 2;
inline constexpr std::size_t kBinConf = 3;
inline constexpr std::size_t kBinResidual = kBinConf + kBins;
inline constexpr std::size_t kChannels = kBinResidual + kBins;
static_assert(kChannels == 33);

Tensor empty_grid();

// Throws ShapeMismatch unless t is 60x60x33.
void require_grid_shape(const Tensor& t);

struct Canvas {
  int width = 1000;
  int height = 1000;
};

struct DecodeThresholds {
  double cell_conf_min = 0.5;
  double bin_conf_min = 0.5;
};

struct BinAssignment {
  std::size_t bin = 0;
  double residual = 0.0;  // in bin widths, relative to the bin center
};

// Bin k spans [24k, 24k + 24); residual = (theta - (24k + 12)) / 24.
BinAssignment assign_bin(double theta_deg);
double bin_center_deg(std::size_t bin);

/// Encodes junction labels into the 60x60x33 target grid.
///
/// A junction belongs to cell (floor(y / ch), floor(x / cw)) with cw = W/60,
/// ch = H/60. dx, dy are offsets from the cell center in cell units. When two
/// junctions land in one cell, the one nearest the cell center wins (earlier
/// one on ties); when two branches of a junction share a bin, the one nearest
/// the bin center wins. Throws Error for a junction outside [0,W) x [0,H).
Tensor encode(std::span<const JunctionLabel> junctions, Canvas canvas);

struct DecodedJunction {
  JunctionLabel label;
  double confidence = 0.0;
  // The cell passed the confidence threshold but no bin did; branches is empty.
  bool branchless = false;
};

/// Inverse of encode for prediction tensors. Cells are visited in row-major
/// order; branch angles come back sorted in [0, 360).
std::vector<DecodedJunction> decode(const Tensor& pred, const DecodeThresholds& thresholds, Canvas canvas);

// Number of junctions encode() keeps after collision resolution.
std::size_t count_positive_cells(const Tensor& grid);

}  // namespace geoforge::codec
