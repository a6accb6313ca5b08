#include <benchmark/benchmark.h>

#include "weatherforge/rng.hpp"
#include "weatherforge/waca.hpp"

using namespace weatherforge;

namespace {

waca::FeatureMap random_features(int w, int h, int c, std::uint64_t seed) {
  SplitMix64 rng(seed);
  waca::FeatureMap m(w, h, c);
  for (auto& v : m.samples())
    v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return m;
}

ScalarMap random_map(int w, int h, std::uint64_t seed) {
  SplitMix64 rng(seed);
  ScalarMap m(w, h);
  for (auto& v : m.samples()) v = static_cast<float>(rng.next_double());
  return m;
}

constexpr int kSide = 32;
constexpr int kChannels = 8;

}  // namespace

static void BM_TggaForward(benchmark::State& state) {
  auto params = waca::random_attention_params(kChannels, 21);
  const auto xq = random_features(kSide, kSide, kChannels, 22);
  const auto xk = random_features(kSide, kSide, kChannels, 23);
  const auto t = random_map(kSide, kSide, 24);
  for (auto _ : state) {
    waca::FeatureMap out = waca::tgga_forward(xq, xk, t, params);
    benchmark::DoNotOptimize(out.samples().data());
  }
}
BENCHMARK(BM_TggaForward);

static void BM_OglaForward(benchmark::State& state) {
  auto params = waca::random_attention_params(kChannels, 25);
  const auto xq = random_features(kSide, kSide, kChannels, 26);
  const auto xk = random_features(kSide, kSide, kChannels, 27);
  const auto alpha = random_map(kSide, kSide, 28);
  for (auto _ : state) {
    waca::FeatureMap out = waca::ogla_forward(xq, xk, alpha, params);
    benchmark::DoNotOptimize(out.samples().data());
  }
}
BENCHMARK(BM_OglaForward);

static void BM_WafFuse(benchmark::State& state) {
  auto params = waca::random_fuser_params(kChannels, 29);
  const auto xt = random_features(kSide, kSide, kChannels, 30);
  const auto xo = random_features(kSide, kSide, kChannels, 31);
  const auto t = random_map(kSide, kSide, 32);
  const auto alpha = random_map(kSide, kSide, 33);
  for (auto _ : state) {
    waca::FeatureMap out = waca::waf_fuse(xt, xo, t, alpha, params);
    benchmark::DoNotOptimize(out.samples().data());
  }
}
BENCHMARK(BM_WafFuse);
