#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace geoforge {

/// Dense float32 tensor, row-major with the last dimension contiguous.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims, float fill = 0.0f);

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::span<const float> view() const { return data; }
  std::span<float> view() { return data; }
};

std::size_t element_count(std::span<const std::size_t> shape);
std::string shape_string(std::span<const std::size_t> shape);

// Throws ShapeMismatch naming `what` when the shapes differ.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

// ---------------------------------------------------------------------------
// Binary formats

/// GJT1 junction target file: ASCII "GJT1", then u32 H, u32 W, u32 C
/// (little-endian), then H*W*C little-endian float32 values, row-major,
/// channel-last.
std::vector<std::uint8_t> encode_gjt1(const Tensor& t);
Tensor decode_gjt1(std::span<const std::uint8_t> bytes);

/// Headerless little-endian float32 array.
std::vector<std::uint8_t> encode_raw_floats(std::span<const float> values);
std::vector<float> decode_raw_floats(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Reads a GJT1 file when it carries the magic, otherwise a raw float array
/// as a rank-1 tensor.
Tensor read_tensor_file(const std::filesystem::path& path);

}  // namespace geoforge
