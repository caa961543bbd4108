#include "geoforge/tensor.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>

#include "geoforge/error.hpp"

namespace geoforge {

static_assert(sizeof(float) == 4);

namespace {

constexpr char kGjtMagic[4] = {'G', 'J', 'T', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[off + i]) << (8 * i);
  return v;
}

void put_floats(std::vector<std::uint8_t>& out, std::span<const float> values) {
  const std::size_t off = out.size();
  out.resize(off + 4 * values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(values[i]);
    for (int k = 0; k < 4; ++k) out[off + 4 * i + k] = static_cast<std::uint8_t>(bits >> (8 * k));
  }
}

std::vector<float> get_floats(std::span<const std::uint8_t> b, std::size_t off, std::size_t count) {
  std::vector<float> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = std::bit_cast<float>(get_u32(b, off + 4 * i));
  return v;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> dims, float fill)
    : shape(std::move(dims)), data(element_count(shape), fill) {}

std::size_t element_count(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(std::span<const std::size_t> shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "x" : "") + std::to_string(shape[i]);
  return s + "]";
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape != b.shape || a.data.size() != b.data.size())
    throw ShapeMismatch(std::string(what) + ": shape " + shape_string(a.shape) + " vs " + shape_string(b.shape));
}

std::vector<std::uint8_t> encode_gjt1(const Tensor& t) {
  if (t.rank() != 3) throw ShapeMismatch("GJT1 tensors are rank 3, got " + shape_string(t.shape));
  std::vector<std::uint8_t> out(std::begin(kGjtMagic), std::end(kGjtMagic));
  out.reserve(16 + 4 * t.size());
  for (std::size_t d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
  put_floats(out, t.data);
  return out;
}

Tensor decode_gjt1(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kGjtMagic, 4) != 0) throw FormatError("not a GJT1 file");
  const std::size_t h = get_u32(bytes, 4), w = get_u32(bytes, 8), c = get_u32(bytes, 12);
  const std::size_t count = h * w * c;
  if (bytes.size() != 16 + 4 * count) throw FormatError("GJT1 payload size does not match its header");
  Tensor t;
  t.shape = {h, w, c};
  t.data = get_floats(bytes, 16, count);
  return t;
}

std::vector<std::uint8_t> encode_raw_floats(std::span<const float> values) {
  std::vector<std::uint8_t> out;
  put_floats(out, values);
  return out;
}

std::vector<float> decode_raw_floats(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 4 != 0) throw FormatError("raw float file size is not a multiple of 4");
  return get_floats(bytes, 0, bytes.size() / 4);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

Tensor read_tensor_file(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kGjtMagic, 4) == 0) return decode_gjt1(bytes);
  Tensor t;
  t.data = decode_raw_floats(bytes);
  t.shape = {t.data.size()};
  return t;
}

}  // namespace geoforge
