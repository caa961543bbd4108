#pragma once

// Serial reference implementations. They are deliberately naive (plain
// loops, explicit masks, brute force) and share no code with the kernels in
// src/, so tests and benchmarks can compare the two.

#include <cstdint>
#include <span>
#include <vector>

#include "geoforge/annotate.hpp"
#include "geoforge/geometry.hpp"
#include "geoforge/losses.hpp"
#include "geoforge/router.hpp"
#include "geoforge/tensor.hpp"

namespace geoforge::reference {

double bce(double p, double t);
double smooth_l1(double x);

double elementwise(loss::Elementwise kind, std::span<const float> pred, std::span<const float> target,
                   std::span<const std::uint8_t> mask);

loss::LossReport junction_loss(const Tensor& pred, const Tensor& target);
loss::LossReport detection_loss(const loss::DetectionInputs& in);
double boundary_loss(std::span<const float> pred, std::span<const float> gt);

// Direct 2-D convolution with the outer product of 1-D Gaussian taps.
std::vector<float> gaussian_blur(std::span<const float> in, int width, int height, double sigma);

// Distance from every pixel to the nearest set pixel by exhaustive search.
std::vector<double> squared_distance_brute(std::span<const std::uint8_t> mask, int width, int height);

// Dense sampling of the ellipse outline.
BBox ellipse_bbox_sampled(const EllipseCurve& e, int samples);

// Matrix-vector product one output at a time.
std::vector<float> linear(const router::Linear& l, std::span<const float> x);
std::vector<float> mlp2(const router::Mlp2& m, std::span<const float> x);

}  // namespace geoforge::reference
