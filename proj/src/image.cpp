#include "geoforge/image.hpp"

#include <fstream>
#include <iterator>

#include <opencv2/imgcodecs.hpp>

#include "geoforge/error.hpp"

namespace geoforge {

namespace {
constexpr int kPngCompression = 1;
}

std::vector<std::uint8_t> encode_png(const GrayImage& image) {
  const cv::Mat m(image.height, image.width, CV_8UC1, const_cast<std::uint8_t*>(image.pixels.data()));
  std::vector<std::uint8_t> out;
  if (!cv::imencode(".png", m, out, {cv::IMWRITE_PNG_COMPRESSION, kPngCompression}))
    throw Error("PNG encoding failed");
  return out;
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  const cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
  const cv::Mat m = cv::imdecode(raw, cv::IMREAD_GRAYSCALE);
  if (m.empty()) throw FormatError("could not decode PNG data");
  GrayImage img(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) std::copy_n(m.ptr<std::uint8_t>(y), m.cols, &img.at(0, y));
  return img;
}

GrayImage read_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

}  // namespace geoforge
