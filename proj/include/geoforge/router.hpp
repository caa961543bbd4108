#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace geoforge::router {

inline constexpr int kGeoChannels = 256;
inline constexpr int kClipChannels = 1024;
inline constexpr int kLevels = 4;  // routed pyramid levels: F1*, F3, F4, F5
inline constexpr int kPooledWidth = kLevels * kGeoChannels + kClipChannels;
inline constexpr int kRouterHidden = 512;
inline constexpr int kConcatChannels = kLevels * kClipChannels + kClipChannels;
inline constexpr int kLlmWidth = 4096;
static_assert(kPooledWidth == 2048);
static_assert(kConcatChannels == 5120);

/// C x H x W grid of scalars, channel-major.
struct FeatureMap {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  FeatureMap() = default;
  FeatureMap(int c, int h, int w, float fill = 0.0f);

  float& at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
  float at(int c, int y, int x) const { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
};

/// Token sequence: `count` rows of `width` values.
struct Tokens {
  std::size_t count = 0;
  std::size_t width = 0;
  std::vector<float> data;
};

// Each spatial position of a map becomes one token, in row-major order.
Tokens to_tokens(const FeatureMap& map);
FeatureMap from_tokens(const Tokens& tokens, int height, int width);

float gelu(float x);

struct Linear {
  int in = 0;
  int out = 0;
  std::vector<float> weight;  // out x in, row-major
  std::vector<float> bias;    // out

  /// y[r] = W x[r] + b for each of `rows` inputs; rows run in parallel.
  void forward(std::span<const float> x, std::size_t rows, std::span<float> y) const;
};

/// Affine -> GELU -> affine, applied per token.
struct Mlp2 {
  Linear first;
  Linear second;

  int in_width() const { return first.in; }
  int out_width() const { return second.out; }
  Tokens forward(const Tokens& x) const;
};

/// Weights uniform in +-1/sqrt(fan_in) drawn from Rng(seed), biases zero.
Mlp2 make_mlp2(int in, int hidden, int out, std::uint64_t seed);

enum class Mode { soft_softmax, soft_sigmoid, sparse, constant };
enum class Fusion { sum, concat };

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view name);

struct RouterWeights {
  std::array<double, kLevels> w{};
};

/// Router MLP (2048 -> 512 -> 4 with GELU) and the per-level channel
/// aligners (256 -> 1024 -> 1024 with GELU). Immutable after construction.
struct RouterParams {
  Mode mode = Mode::soft_softmax;
  std::uint64_t seed = 0;
  Mlp2 gate;
  std::array<Mlp2, kLevels> align;

  static RouterParams seeded(Mode mode, std::uint64_t seed);
};

/// Spatial mean of every channel, concatenated as [geo1..geo4, clip].
/// Throws ShapeMismatch unless the geo maps have 256 channels and clip 1024.
std::vector<float> pool_concat(std::span<const FeatureMap, kLevels> geo, const FeatureMap& clip);

// Activation of the four router logits for a mode. Sparse ties pick the lowest level.
RouterWeights activate(std::span<const double, kLevels> logits, Mode mode);

/// Router weights for a pooled vector. Constant mode ignores the input.
/// Throws Error on non-finite input.
RouterWeights route(std::span<const float> pooled, const RouterParams& params);

/// Bilinear resize with half-pixel centers and edge clamping.
FeatureMap resize_bilinear(const FeatureMap& map, int height, int width);

/// Resizes a geo level to the clip grid and aligns it to 1024 channels.
FeatureMap align_level(const FeatureMap& geo, int level, const FeatureMap& clip, const RouterParams& params);

/// Weighted fusion of the aligned geo levels.
///   sum:    sum_i w_i * A_i, 1024 channels (levels with w_i == 0 are skipped)
///   concat: [w_1 A_1, ..., w_4 A_4, clip], 5120 channels
FeatureMap fuse(std::span<const FeatureMap, kLevels> geo, const FeatureMap& clip, const RouterWeights& w,
                Fusion strategy, const RouterParams& params);

/// Linear interpolation along the sequence to round(fraction * clip_count)
/// tokens. Throws Error unless 0 < fraction.
Tokens resize_tokens(const Tokens& geo, double fraction, std::size_t clip_count);

// Sequence-wise fusion appends the geo tokens after the clip tokens.
Tokens sequence_concat(const Tokens& clip, const Tokens& geo);

enum class ProjectorKind { channel_single, sequence_dual };

/// mlp2x_gelu projectors into the 4096-wide embedding space.
/// channel_single: one 5120 -> 4096 -> 4096 projector.
/// sequence_dual: two 1024 -> 4096 -> 4096 projectors (clip branch, geo branch).
std::vector<Mlp2> make_projectors(ProjectorKind kind, std::uint64_t seed);

/// Throws ShapeMismatch when the token width differs from the projector input.
Tokens project(const Tokens& tokens, const Mlp2& projector);

// ---------------------------------------------------------------------------
// Serialization: "GRP1", u32 header length, JSON header (mode, seed, block
// names and shapes), then each block as little-endian float32 in header order.

std::vector<std::uint8_t> serialize(const RouterParams& params);
RouterParams deserialize(std::span<const std::uint8_t> bytes);

}  // namespace geoforge::router
