#include <benchmark/benchmark.h>

#include "weatherforge/metrics.hpp"
#include "weatherforge/occlusion.hpp"
#include "weatherforge/priors.hpp"
#include "weatherforge/restore.hpp"
#include "weatherforge/rng.hpp"
#include "weatherforge/scatter.hpp"
#include "weatherforge/synth.hpp"

using namespace weatherforge;

namespace {

Image random_image(int w, int h, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Image img(w, h);
  for (auto& v : img.samples())
    v = static_cast<float>(rng.next_double());
  return img;
}

ScalarMap ramp_depth(int w, int h, double far) {
  ScalarMap d(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      d(x, y) = static_cast<float>(far * (y + 1) / h);
  return d;
}

constexpr int kSide = 256;

}  // namespace

static void BM_TransmissionFromDepth(benchmark::State& state) {
  const ScalarMap depth = ramp_depth(kSide, kSide, 300.0);
  for (auto _ : state) {
    auto t = scatter::transmission_from_depth(depth, 0.02f);
    benchmark::DoNotOptimize(t.map.samples().data());
  }
}
BENCHMARK(BM_TransmissionFromDepth);

static void BM_ScatteringComposite(benchmark::State& state) {
  const Image scene = random_image(kSide, kSide, 1);
  const auto t = scatter::transmission_from_depth(
      ramp_depth(kSide, kSide, 300.0), 0.02f);
  for (auto _ : state) {
    Image b = scatter::scattering_composite(scene, t, 0.9f);
    benchmark::DoNotOptimize(b.samples().data());
  }
}
BENCHMARK(BM_ScatteringComposite);

static void BM_RainLayer(benchmark::State& state) {
  occlusion::LayerSpec spec;
  spec.kind = occlusion::ParticleKind::Rain;
  spec.density = 200.0;
  spec.length = 14.0;
  spec.width = 1.4;
  spec.angle_deg = 12.0;
  spec.blur_sigma = 0.5;
  spec.seed = 11;
  for (auto _ : state) {
    ScalarMap layer = occlusion::generate_rain_layer(kSide, kSide, spec);
    benchmark::DoNotOptimize(layer.samples().data());
  }
}
BENCHMARK(BM_RainLayer);

static void BM_SnowLayer(benchmark::State& state) {
  occlusion::LayerSpec spec;
  spec.kind = occlusion::ParticleKind::Snow;
  spec.density = 250.0;
  spec.radius_min = 1.0;
  spec.radius_max = 2.5;
  spec.blur_sigma = 0.4;
  spec.seed = 12;
  for (auto _ : state) {
    ScalarMap layer = occlusion::generate_snow_layer(kSide, kSide, spec);
    benchmark::DoNotOptimize(layer.samples().data());
  }
}
BENCHMARK(BM_SnowLayer);

static void BM_SynthesizeSample(benchmark::State& state) {
  const Image clean = random_image(kSide, kSide, 2);
  const ScalarMap depth = ramp_depth(kSide, kSide, 300.0);
  const synth::WeatherParams params =
      synth::sample_weather_params(3, 0, synth::WeatherClass::Rain);
  for (auto _ : state) {
    synth::DegradedSample s = synth::synthesize_sample(clean, depth, params);
    benchmark::DoNotOptimize(s.degraded.samples().data());
  }
}
BENCHMARK(BM_SynthesizeSample);

static void BM_RestoreOracle(benchmark::State& state) {
  const Image clean = random_image(kSide, kSide, 4);
  const ScalarMap depth = ramp_depth(kSide, kSide, 300.0);
  const synth::WeatherParams params =
      synth::sample_weather_params(5, 0, synth::WeatherClass::Haze);
  const synth::DegradedSample s =
      synth::synthesize_sample(clean, depth, params);
  restore::OraclePriors priors{s.transmission, s.alpha,
                               params.occlusion_brightness,
                               params.atmosphere.light};
  for (auto _ : state) {
    Image j = restore::restore_with_oracle(s.degraded, priors);
    benchmark::DoNotOptimize(j.samples().data());
  }
}
BENCHMARK(BM_RestoreOracle);

static void BM_DarkChannel(benchmark::State& state) {
  const Image img = random_image(kSide, kSide, 6);
  for (auto _ : state) {
    ScalarMap dc = priors::dark_channel(img);
    benchmark::DoNotOptimize(dc.samples().data());
  }
}
BENCHMARK(BM_DarkChannel);

static void BM_Psnr(benchmark::State& state) {
  const Image a = random_image(kSide, kSide, 7);
  const Image b = random_image(kSide, kSide, 8);
  for (auto _ : state) {
    double v = metrics::psnr(a, b);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_Psnr);

static void BM_Ssim(benchmark::State& state) {
  const Image a = random_image(kSide, kSide, 9);
  const Image b = random_image(kSide, kSide, 10);
  for (auto _ : state) {
    double v = metrics::ssim(a, b);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_Ssim);

BENCHMARK_MAIN();
