// Times the OpenMP kernels against the serial reference implementations.
//
//   bench_kernels [repeats]

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "geoforge/annotate.hpp"
#include "geoforge/junction_codec.hpp"
#include "geoforge/losses.hpp"
#include "geoforge/metrics.hpp"
#include "geoforge/rng.hpp"
#include "geoforge/router.hpp"
#include "geoforge/scene.hpp"
#include "reference.hpp"

using namespace geoforge;

namespace {

double best_ms(int repeats, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (ms < best) best = ms;
  }
  return best;
}

void row(const char* name, double fast, double ref, double check) {
  std::printf("%-28s %10.3f ms %10.3f ms %8.2fx   check %.3g\n", name, fast, ref, ref / fast, check);
}

std::vector<float> random_floats(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<float> v(n);
  for (float& x : v) x = static_cast<float>(rng.uniform(lo, hi));
  return v;
}

volatile double sink;

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
  std::printf("threads: %d   repeats: %d\n", omp_get_max_threads(), repeats);
  std::printf("%-28s %13s %13s %9s\n", "kernel", "openmp", "reference", "speedup");
  Rng rng(7);

  {
    const std::size_t n = 1 << 22;
    const auto p = random_floats(rng, n, 0.0, 1.0);
    const auto t = random_floats(rng, n, 0.0, 1.0);
    std::vector<std::uint8_t> mask(n);
    for (auto& m : mask) m = rng.bernoulli(0.5);
    double a = 0, b = 0;
    const double fast = best_ms(repeats, [&] { sink = a = loss::elementwise(loss::Elementwise::bce, p, t, mask); });
    const double ref = best_ms(repeats, [&] { sink = b = reference::elementwise(loss::Elementwise::bce, p, t, mask); });
    row("bce 4M masked", fast, ref, std::abs(a - b) / b);
  }

  {
    Tensor pred({60, 60, 33}), target = codec::empty_grid();
    for (float& v : pred.data) v = static_cast<float>(rng.uniform());
    for (std::size_t c = 0; c < 3600; c += 7) target.data[c * 33] = 1.0f;
    double a = 0, b = 0;
    const double fast = best_ms(repeats, [&] { sink = a = loss::junction_loss(pred, target).total; });
    const double ref = best_ms(repeats, [&] { sink = b = reference::junction_loss(pred, target).total; });
    row("junction_loss 60x60x33", fast, ref, std::abs(a - b) / b);
  }

  {
    const int w = 400, h = 400;
    std::vector<float> in(static_cast<std::size_t>(w) * h, 0.0f), out(in.size());
    for (int i = 0; i < 2000; ++i) in[rng.uniform_int(0, static_cast<long>(in.size()) - 1)] = 1.0f;
    std::vector<float> ref_out;
    const double fast = best_ms(repeats, [&] { gaussian_blur(in, out, w, h, 1.0); });
    const double ref = best_ms(repeats, [&] { ref_out = reference::gaussian_blur(in, w, h, 1.0); });
    double err = 0;
    for (std::size_t i = 0; i < out.size(); ++i) err = std::max(err, double(std::abs(out[i] - ref_out[i])));
    row("gaussian_blur 400x400", fast, ref, err);
  }

  {
    const int w = 96, h = 96;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
    for (int i = 0; i < 40; ++i) mask[rng.uniform_int(0, static_cast<long>(mask.size()) - 1)] = 1;
    std::vector<double> a, b;
    const double fast = best_ms(repeats, [&] { a = metrics::squared_distance_transform(mask, w, h); });
    const double ref = best_ms(1, [&] { b = reference::squared_distance_brute(mask, w, h); });
    double err = 0;
    for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
    row("distance_transform 96x96", fast, ref, err);
  }

  {
    const auto mlp = router::make_mlp2(1024, 4096, 4096, 3);
    router::Tokens x{16, 1024, random_floats(rng, 16 * 1024, -1.0, 1.0)};
    router::Tokens y;
    std::vector<float> r;
    const double fast = best_ms(repeats, [&] { y = mlp.forward(x); });
    const double ref = best_ms(1, [&] {
      for (std::size_t t = 0; t < x.count; ++t) r = reference::mlp2(mlp, std::span(x.data).subspan(t * 1024, 1024));
    });
    double err = 0;
    for (std::size_t i = 0; i < 4096; ++i) err = std::max(err, double(std::abs(y.data[15 * 4096 + i] - r[i])));
    row("mlp2 16x1024->4096", fast, ref, err);
  }

  {
    GenConfig cfg;
    cfg.count = 32;
    std::size_t junctions = 0;
    const double ms = best_ms(1, [&] {
      junctions = 0;
      for (long i = 0; i < cfg.count; ++i) {
        const Scene s = sample_scene(cfg, i);
        junctions += extract_junctions(s).size();
        sink = boundary_heatmap(s).values[0];
      }
    });
    std::printf("%-28s %10.3f ms per image (%zu junctions)\n", "scene+annotate 1000x1000", ms / cfg.count, junctions);
  }
  return 0;
}
