#include "geoforge/router.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "json.hpp"

#include "geoforge/error.hpp"
#include "geoforge/rng.hpp"
#include "geoforge/tensor.hpp"

namespace geoforge::router {

namespace {

std::size_t index(int c, int y, int x, int h, int w) { return (static_cast<std::size_t>(c) * h + y) * w + x; }

void require_channels(const FeatureMap& m, int channels, const char* what) {
  if (m.channels != channels)
    throw ShapeMismatch(std::string(what) + ": expected " + std::to_string(channels) + " channels, got " +
                        std::to_string(m.channels));
  if (m.height < 1 || m.width < 1) throw ShapeMismatch(std::string(what) + ": empty spatial grid");
  if (m.data.size() != static_cast<std::size_t>(m.channels) * m.height * m.width)
    throw ShapeMismatch(std::string(what) + ": buffer size does not match dimensions");
}

Linear make_linear(int in, int out, Rng rng) {
  Linear l{in, out, std::vector<float>(static_cast<std::size_t>(in) * out), std::vector<float>(out, 0.0f)};
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (float& w : l.weight) w = static_cast<float>(rng.uniform(-bound, bound));
  return l;
}

}  // namespace

FeatureMap::FeatureMap(int c, int h, int w, float fill)
    : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, fill) {}

Tokens to_tokens(const FeatureMap& map) {
  Tokens t{static_cast<std::size_t>(map.height) * map.width, static_cast<std::size_t>(map.channels), {}};
  t.data.resize(t.count * t.width);
  for (int c = 0; c < map.channels; ++c)
    for (int y = 0; y < map.height; ++y)
      for (int x = 0; x < map.width; ++x)
        t.data[(static_cast<std::size_t>(y) * map.width + x) * t.width + c] = map.at(c, y, x);
  return t;
}

FeatureMap from_tokens(const Tokens& tokens, int height, int width) {
  if (tokens.count != static_cast<std::size_t>(height) * width)
    throw ShapeMismatch("from_tokens: token count does not match the grid");
  FeatureMap m(static_cast<int>(tokens.width), height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (std::size_t c = 0; c < tokens.width; ++c)
        m.at(static_cast<int>(c), y, x) = tokens.data[(static_cast<std::size_t>(y) * width + x) * tokens.width + c];
  return m;
}

float gelu(float x) { return static_cast<float>(0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0)))); }

void Linear::forward(std::span<const float> x, std::size_t rows, std::span<float> y) const {
  if (x.size() != rows * in || y.size() != rows * out) throw ShapeMismatch("Linear::forward: buffer size mismatch");
  const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(rows) * out;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const std::size_t r = static_cast<std::size_t>(k) / out, o = static_cast<std::size_t>(k) % out;
    const float* xr = x.data() + r * in;
    const float* wr = weight.data() + o * in;
    double acc = bias[o];
    for (int i = 0; i < in; ++i) acc += static_cast<double>(wr[i]) * xr[i];
    y[k] = static_cast<float>(acc);
  }
}

Tokens Mlp2::forward(const Tokens& x) const {
  if (x.width != static_cast<std::size_t>(first.in))
    throw ShapeMismatch("mlp: token width " + std::to_string(x.width) + " does not match input width " +
                        std::to_string(first.in));
  std::vector<float> hidden(x.count * first.out);
  first.forward(x.data, x.count, hidden);
  for (float& h : hidden) h = gelu(h);
  Tokens y{x.count, static_cast<std::size_t>(second.out), std::vector<float>(x.count * second.out)};
  second.forward(hidden, x.count, y.data);
  return y;
}

Mlp2 make_mlp2(int in, int hidden, int out, std::uint64_t seed) {
  const Rng root(seed);
  return {make_linear(in, hidden, root.split(0)), make_linear(hidden, out, root.split(1))};
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::soft_softmax:
      return "soft_softmax";
    case Mode::soft_sigmoid:
      return "soft_sigmoid";
    case Mode::sparse:
      return "sparse";
    case Mode::constant:
      return "constant";
  }
  return "?";
}

Mode mode_from_string(std::string_view name) {
  for (Mode m : {Mode::soft_softmax, Mode::soft_sigmoid, Mode::sparse, Mode::constant})
    if (to_string(m) == name) return m;
  throw Error("unknown router mode: " + std::string(name));
}

RouterParams RouterParams::seeded(Mode mode, std::uint64_t seed) {
  RouterParams p;
  p.mode = mode;
  p.seed = seed;
  const Rng root(seed);
  p.gate = make_mlp2(kPooledWidth, kRouterHidden, kLevels, root.split(0).state());
  for (int i = 0; i < kLevels; ++i)
    p.align[i] = make_mlp2(kGeoChannels, kClipChannels, kClipChannels, root.split(1 + i).state());
  return p;
}

std::vector<float> pool_concat(std::span<const FeatureMap, kLevels> geo, const FeatureMap& clip) {
  for (const FeatureMap& g : geo) require_channels(g, kGeoChannels, "pool_concat geo level");
  require_channels(clip, kClipChannels, "pool_concat clip");
  std::vector<float> out;
  out.reserve(kPooledWidth);
  const auto pool = [&out](const FeatureMap& m) {
    const std::size_t plane = static_cast<std::size_t>(m.height) * m.width;
    for (int c = 0; c < m.channels; ++c) {
      const float* p = m.data.data() + c * plane;
      double s = 0.0;
      for (std::size_t i = 0; i < plane; ++i) s += p[i];
      out.push_back(static_cast<float>(s / static_cast<double>(plane)));
    }
  };
  for (const FeatureMap& g : geo) pool(g);
  pool(clip);
  return out;
}

RouterWeights activate(std::span<const double, kLevels> logits, Mode mode) {
  RouterWeights r;
  switch (mode) {
    case Mode::constant:
      r.w.fill(1.0 / kLevels);
      break;
    case Mode::sparse: {
      const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
      r.w[static_cast<std::size_t>(best)] = 1.0;
      break;
    }
    case Mode::soft_sigmoid:
      for (int i = 0; i < kLevels; ++i) r.w[i] = 1.0 / (1.0 + std::exp(-logits[i]));
      break;
    case Mode::soft_softmax: {
      const double top = *std::max_element(logits.begin(), logits.end());
      double sum = 0.0;
      for (int i = 0; i < kLevels; ++i) sum += r.w[i] = std::exp(logits[i] - top);
      for (double& w : r.w) w /= sum;
      break;
    }
  }
  return r;
}

RouterWeights route(std::span<const float> pooled, const RouterParams& params) {
  if (pooled.size() != kPooledWidth)
    throw ShapeMismatch("route: pooled vector must have 2048 entries, got " + std::to_string(pooled.size()));
  if (!std::all_of(pooled.begin(), pooled.end(), [](float v) { return std::isfinite(v); }))
    throw Error("route: non-finite input");
  if (params.mode == Mode::constant) {
    const std::array<double, kLevels> zeros{};
    return activate(zeros, Mode::constant);
  }
  const Tokens x{1, kPooledWidth, std::vector<float>(pooled.begin(), pooled.end())};
  const Tokens y = params.gate.forward(x);
  std::array<double, kLevels> logits{};
  for (int i = 0; i < kLevels; ++i) logits[i] = y.data[i];
  if (!std::all_of(logits.begin(), logits.end(), [](double v) { return std::isfinite(v); }))
    throw Error("route: non-finite logits");
  return activate(logits, params.mode);
}

FeatureMap resize_bilinear(const FeatureMap& map, int height, int width) {
  if (map.height < 1 || map.width < 1 || height < 1 || width < 1) throw Error("resize_bilinear: zero-sized map");
  if (map.height == height && map.width == width) return map;
  FeatureMap out(map.channels, height, width);
  const double sy = static_cast<double>(map.height) / height, sx = static_cast<double>(map.width) / width;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < map.channels; ++c) {
    for (int y = 0; y < height; ++y) {
      const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, map.height - 1.0);
      const int y0 = static_cast<int>(fy), y1 = std::min(y0 + 1, map.height - 1);
      const double ty = fy - y0;
      for (int x = 0; x < width; ++x) {
        const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, map.width - 1.0);
        const int x0 = static_cast<int>(fx), x1 = std::min(x0 + 1, map.width - 1);
        const double tx = fx - x0;
        const double top = (1 - tx) * map.data[index(c, y0, x0, map.height, map.width)] +
                           tx * map.data[index(c, y0, x1, map.height, map.width)];
        const double bot = (1 - tx) * map.data[index(c, y1, x0, map.height, map.width)] +
                           tx * map.data[index(c, y1, x1, map.height, map.width)];
        out.data[index(c, y, x, height, width)] = static_cast<float>((1 - ty) * top + ty * bot);
      }
    }
  }
  return out;
}

FeatureMap align_level(const FeatureMap& geo, int level, const FeatureMap& clip, const RouterParams& params) {
  require_channels(geo, kGeoChannels, "fuse geo level");
  require_channels(clip, kClipChannels, "fuse clip");
  if (level < 0 || level >= kLevels) throw Error("align_level: level out of range");
  const FeatureMap resized = resize_bilinear(geo, clip.height, clip.width);
  return from_tokens(params.align[level].forward(to_tokens(resized)), clip.height, clip.width);
}

FeatureMap fuse(std::span<const FeatureMap, kLevels> geo, const FeatureMap& clip, const RouterWeights& w,
                Fusion strategy, const RouterParams& params) {
  require_channels(clip, kClipChannels, "fuse clip");
  for (const FeatureMap& g : geo) require_channels(g, kGeoChannels, "fuse geo level");
  const std::size_t block = static_cast<std::size_t>(kClipChannels) * clip.height * clip.width;

  if (strategy == Fusion::sum) {
    FeatureMap out(kClipChannels, clip.height, clip.width);
    bool first = true;
    for (int i = 0; i < kLevels; ++i) {
      if (w.w[i] == 0.0) continue;
      const FeatureMap a = align_level(geo[i], i, clip, params);
      const auto wi = static_cast<float>(w.w[i]);
      for (std::size_t k = 0; k < block; ++k) out.data[k] = first ? wi * a.data[k] : out.data[k] + wi * a.data[k];
      first = false;
    }
    return out;
  }

  FeatureMap out(kConcatChannels, clip.height, clip.width);
  for (int i = 0; i < kLevels; ++i) {
    const FeatureMap a = align_level(geo[i], i, clip, params);
    const auto wi = static_cast<float>(w.w[i]);
    float* dst = out.data.data() + i * block;
    for (std::size_t k = 0; k < block; ++k) dst[k] = wi * a.data[k];
  }
  std::copy(clip.data.begin(), clip.data.end(), out.data.begin() + kLevels * block);
  return out;
}

Tokens resize_tokens(const Tokens& geo, double fraction, std::size_t clip_count) {
  if (!(fraction > 0.0) || !std::isfinite(fraction)) throw Error("resize_tokens: fraction must be > 0");
  if (geo.count == 0) throw Error("resize_tokens: empty token sequence");
  const auto target = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * clip_count)));
  if (target == geo.count) return geo;
  Tokens out{target, geo.width, std::vector<float>(target * geo.width)};
  const double scale = static_cast<double>(geo.count) / target;
  for (std::size_t i = 0; i < target; ++i) {
    const double f = std::clamp((i + 0.5) * scale - 0.5, 0.0, geo.count - 1.0);
    const auto i0 = static_cast<std::size_t>(f);
    const std::size_t i1 = std::min(i0 + 1, geo.count - 1);
    const double t = f - i0;
    for (std::size_t c = 0; c < geo.width; ++c)
      out.data[i * geo.width + c] =
          static_cast<float>((1 - t) * geo.data[i0 * geo.width + c] + t * geo.data[i1 * geo.width + c]);
  }
  return out;
}

Tokens sequence_concat(const Tokens& clip, const Tokens& geo) {
  if (clip.width != geo.width) throw ShapeMismatch("sequence_concat: token widths differ");
  Tokens out{clip.count + geo.count, clip.width, clip.data};
  out.data.insert(out.data.end(), geo.data.begin(), geo.data.end());
  return out;
}

std::vector<Mlp2> make_projectors(ProjectorKind kind, std::uint64_t seed) {
  const Rng root(seed);
  if (kind == ProjectorKind::channel_single) return {make_mlp2(kConcatChannels, kLlmWidth, kLlmWidth, root.split(0).state())};
  return {make_mlp2(kClipChannels, kLlmWidth, kLlmWidth, root.split(0).state()),
          make_mlp2(kClipChannels, kLlmWidth, kLlmWidth, root.split(1).state())};
}

Tokens project(const Tokens& tokens, const Mlp2& projector) { return projector.forward(tokens); }

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'G', 'R', 'P', '1'};

void add_linear(nlohmann::json& blocks, std::vector<const std::vector<float>*>& data, const std::string& name,
                const Linear& l) {
  blocks.push_back({{"name", name + ".weight"}, {"shape", {l.out, l.in}}});
  data.push_back(&l.weight);
  blocks.push_back({{"name", name + ".bias"}, {"shape", {l.out}}});
  data.push_back(&l.bias);
}

}  // namespace

std::vector<std::uint8_t> serialize(const RouterParams& params) {
  nlohmann::json header;
  header["mode"] = to_string(params.mode);
  header["seed"] = params.seed;
  header["blocks"] = nlohmann::json::array();
  std::vector<const std::vector<float>*> data;
  add_linear(header["blocks"], data, "gate.0", params.gate.first);
  add_linear(header["blocks"], data, "gate.1", params.gate.second);
  for (int i = 0; i < kLevels; ++i) {
    add_linear(header["blocks"], data, "align" + std::to_string(i) + ".0", params.align[i].first);
    add_linear(header["blocks"], data, "align" + std::to_string(i) + ".1", params.align[i].second);
  }
  const std::string text = header.dump();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  const auto len = static_cast<std::uint32_t>(text.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
  out.insert(out.end(), text.begin(), text.end());
  for (const auto* block : data) {
    const auto bytes = encode_raw_floats(*block);
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  return out;
}

RouterParams deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("not a GRP1 file");
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(bytes[4 + i]) << (8 * i);
  if (bytes.size() < 8 + static_cast<std::size_t>(len)) throw FormatError("GRP1 header truncated");
  const auto header = nlohmann::json::parse(bytes.begin() + 8, bytes.begin() + 8 + len);

  RouterParams p;
  p.mode = mode_from_string(header.at("mode").get<std::string>());
  p.seed = header.at("seed").get<std::uint64_t>();
  std::vector<Linear*> layers{&p.gate.first, &p.gate.second};
  for (auto& a : p.align) {
    layers.push_back(&a.first);
    layers.push_back(&a.second);
  }
  const auto& blocks = header.at("blocks");
  if (blocks.size() != 2 * layers.size()) throw FormatError("GRP1 block count mismatch");
  std::size_t off = 8 + len;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto shape = blocks[b].at("shape").get<std::vector<std::size_t>>();
    const std::size_t n = element_count(shape);
    if (off + 4 * n > bytes.size()) throw FormatError("GRP1 payload truncated");
    std::vector<float> values = decode_raw_floats(bytes.subspan(off, 4 * n));
    off += 4 * n;
    Linear& l = *layers[b / 2];
    if (b % 2 == 0) {
      if (shape.size() != 2) throw FormatError("GRP1 weight block must be rank 2");
      l.out = static_cast<int>(shape[0]);
      l.in = static_cast<int>(shape[1]);
      l.weight = std::move(values);
    } else {
      if (shape.size() != 1 || static_cast<int>(shape[0]) != l.out) throw FormatError("GRP1 bias shape mismatch");
      l.bias = std::move(values);
    }
  }
  if (off != bytes.size()) throw FormatError("GRP1 trailing bytes");
  return p;
}

}  // namespace geoforge::router
