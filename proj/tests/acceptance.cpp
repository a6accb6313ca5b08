// Release gate: every run prints one line per criterion and exits nonzero if
// any of them fails. Tolerances and budgets are pinned here, next to the
// checks that use them, so a regression cannot hide behind a config change.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "attn_check.hpp"
#include "test_support.hpp"
#include "weatherforge/image_io.hpp"
#include "weatherforge/metrics.hpp"
#include "weatherforge/occlusion.hpp"
#include "weatherforge/restore.hpp"
#include "weatherforge/rng.hpp"
#include "weatherforge/synth.hpp"

namespace fs = std::filesystem;
using namespace weatherforge;
using namespace testsupport;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string describe(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// PSNR restricted to pixels the closed-form inversion can actually recover:
// transmission above the divisor floor and coverage below the ceiling.
double masked_psnr(const Image& a, const Image& b, const ScalarMap& t,
                   const ScalarMap& alpha, float t_floor,
                   float alpha_ceiling) {
  double se = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      if (t(x, y) < t_floor || alpha(x, y) > alpha_ceiling) continue;
      for (int c = 0; c < Image::kChannels; ++c) {
        const double d =
            static_cast<double>(a(x, y, c)) - static_cast<double>(b(x, y, c));
        se += d * d;
        n += 1;
      }
    }
  if (n == 0) return 0.0;
  const double mse = se / static_cast<double>(n);
  return mse == 0.0 ? kInf : 10.0 * std::log10(1.0 / mse);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1. Synthesize, store at float precision, restore with the recorded priors;
//    every sample must come back above 50 dB on recoverable pixels, fast.
Outcome round_trip_identity() {
  constexpr int kSampleCount = 50;
  constexpr double kMinPsnrDb = 50.0;
  constexpr double kBudgetSeconds = 30.0;
  constexpr float kTFloor = scatter::kDefaultTransmissionFloor;
  constexpr float kAlphaCeiling = occlusion::kDefaultAlphaCeiling;

  TempDir dir;
  const auto start = Clock::now();
  double worst = kInf;
  const synth::WeatherClass classes[] = {synth::WeatherClass::Haze,
                                         synth::WeatherClass::Rain,
                                         synth::WeatherClass::Snow};
  for (int i = 0; i < kSampleCount; ++i) {
    const synth::WeatherClass cls = classes[i % 3];
    const Image scene = textured_scene(128, 128, 9000 + i);
    const ScalarMap depth =
        ramp_depth(128, 128, 9100 + i, 60.0 + 40.0 * (i % 3));
    const synth::WeatherParams params =
        synth::sample_weather_params(4242, i, cls);
    const synth::DegradedSample sample =
        synth::synthesize_sample(scene, depth, params);

    write_image_pfm(sample.degraded, dir.file("lq.pfm"));
    write_scalar_map(sample.transmission.map, dir.file("t.pfm"));
    write_scalar_map(sample.alpha, dir.file("alpha.pfm"));
    std::ofstream(dir.file("meta.json"))
        << synth::params_to_json_string(sample.params) << '\n';

    const Image lq = read_image(dir.file("lq.pfm"));
    const synth::WeatherParams meta =
        synth::params_from_json_file(dir.file("meta.json"));
    restore::OraclePriors priors;
    priors.transmission.map = read_scalar_map(dir.file("t.pfm"));
    priors.alpha = read_scalar_map(dir.file("alpha.pfm"));
    priors.occlusion_brightness = meta.occlusion_brightness;
    priors.atmospheric_light = meta.atmosphere.light;
    const Image restored =
        restore::restore_with_oracle(lq, priors, kTFloor, kAlphaCeiling);
    worst = std::min(worst, masked_psnr(restored, sample.clean,
                                        priors.transmission.map, priors.alpha,
                                        kTFloor, kAlphaCeiling));
  }
  const double elapsed = seconds_since(start);
  return {worst >= kMinPsnrDb && elapsed < kBudgetSeconds,
          describe("min PSNR %.1f dB over %d samples (need >= %.0f), "
                   "%.1f s (budget %.0f s)",
                   worst, kSampleCount, kMinPsnrDb, elapsed, kBudgetSeconds)};
}

// 2. Haze-only samples equal the scattering form; scatter-free samples have
//    t == 1 and equal the matting form, recomputed here in double.
Outcome special_case_reductions() {
  constexpr double kTol = 1e-6;

  const Image scene = textured_scene(64, 48, 700);
  const ScalarMap depth = ramp_depth(64, 48, 701, 90.0);
  double err = 0.0;

  {
    const synth::WeatherParams params =
        synth::sample_weather_params(777, 0, synth::WeatherClass::Haze);
    const synth::DegradedSample s =
        synth::synthesize_sample(scene, depth, params);
    const double a = params.atmosphere.light;
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 64; ++x) {
        const double t = s.transmission.map(x, y);
        for (int c = 0; c < Image::kChannels; ++c) {
          const double expected = s.clean(x, y, c) * t + a * (1.0 - t);
          err = std::max(
              err, std::abs(static_cast<double>(s.degraded(x, y, c)) -
                            expected));
        }
      }
  }

  synth::SamplerRanges no_scatter;
  no_scatter.scatter_probability = 0.0;
  for (const auto cls :
       {synth::WeatherClass::Rain, synth::WeatherClass::Snow}) {
    const synth::WeatherParams params = synth::sample_weather_params(
        777, cls == synth::WeatherClass::Rain ? 1 : 2, cls, no_scatter);
    const synth::DegradedSample s =
        synth::synthesize_sample(scene, depth, params);
    for (const float t : s.transmission.map.samples())
      err = std::max(err, std::abs(static_cast<double>(t) - 1.0));
    const double o = params.occlusion_brightness;
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 64; ++x) {
        const double alpha = s.alpha(x, y);
        for (int c = 0; c < Image::kChannels; ++c) {
          const double expected =
              o * alpha + s.clean(x, y, c) * (1.0 - alpha);
          err = std::max(
              err, std::abs(static_cast<double>(s.degraded(x, y, c)) -
                            expected));
        }
      }
  }
  return {err <= kTol,
          describe("max abs deviation %.2e over the haze/rain/snow "
                   "reductions (tol %.0e)",
                   err, kTol)};
}

// 3. Clamp-free volumetric coverage equals the near + depth-weighted far
//    accumulation recomputed from the individual layers, and never
//    decreases as the scene gets deeper.
Outcome volumetric_accumulation() {
  constexpr double kTol = 1e-6;
  constexpr double kMonotoneSlack = 1e-7;
  const int w = 64, h = 48;

  occlusion::LayerSpec near;
  near.kind = occlusion::ParticleKind::Rain;
  near.density = 40.0;
  near.angle_deg = -8.0;
  near.length = 18.0;
  near.width = 2.0;
  near.blur_sigma = 0.5;
  near.peak_alpha = 0.25;
  near.seed = derive_seed(31, 0);

  occlusion::LayerSpec far_rain = near;
  far_rain.density = 250.0;
  far_rain.length = 10.0;
  far_rain.width = 1.2;
  far_rain.blur_sigma = 0.4;
  far_rain.peak_alpha = 0.2;
  far_rain.seed = derive_seed(31, 1);

  occlusion::LayerSpec far_snow;
  far_snow.kind = occlusion::ParticleKind::Snow;
  far_snow.density = 300.0;
  far_snow.radius_min = 0.7;
  far_snow.radius_max = 2.0;
  far_snow.blur_sigma = 0.3;
  far_snow.peak_alpha = 0.2;
  far_snow.seed = derive_seed(31, 2);

  // Peak budget 0.25 + 0.2 + 0.2 = 0.65 < 1, so the clamp never engages.
  occlusion::VolumetricConfig cfg;
  cfg.beta = 0.012f;
  cfg.near_layers = {near};
  cfg.far_layers = {far_rain, far_snow};

  const ScalarMap depth = ramp_depth(w, h, 77, 200.0);
  const ScalarMap alpha = occlusion::volumetric_alpha(cfg, depth);
  const ScalarMap ln = occlusion::generate_layer(w, h, near);
  const ScalarMap f1 = occlusion::generate_layer(w, h, far_rain);
  const ScalarMap f2 = occlusion::generate_layer(w, h, far_snow);

  double err = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double weight =
        1.0 - std::exp(-static_cast<double>(cfg.beta) * depth[i]);
    const double expected = ln[i] + weight * (f1[i] + f2[i]);
    err = std::max(err, std::abs(static_cast<double>(alpha[i]) - expected));
  }

  double min_margin = kInf;
  ScalarMap prev = occlusion::volumetric_alpha(cfg, ScalarMap(w, h, 2.0f));
  for (const float d : {20.0f, 80.0f, 300.0f}) {
    const ScalarMap next =
        occlusion::volumetric_alpha(cfg, ScalarMap(w, h, d));
    for (std::size_t i = 0; i < next.size(); ++i)
      min_margin = std::min(
          min_margin, static_cast<double>(next[i]) - prev[i]);
    prev = next;
  }
  return {err <= kTol && min_margin >= -kMonotoneSlack,
          describe("max abs deviation %.2e (tol %.0e), min depth-step "
                   "margin %.1e",
                   err, kTol, min_margin)};
}

// 4. The attention invariance suite: softmax normalization, the constant
//    prior reductions and the 4x4 dense-loop oracle comparisons.
Outcome attention_invariances() {
  const auto results = cli::run_attention_checks(11);
  std::size_t passed = 0;
  const cli::CheckResult* first_fail = nullptr;
  for (const auto& r : results) {
    if (r.pass)
      ++passed;
    else if (!first_fail)
      first_fail = &r;
  }
  if (first_fail)
    return {false, describe("%zu/%zu checks pass; first failure '%s' "
                            "(err %.2e, tol %.0e)",
                            passed, results.size(), first_fail->name.c_str(),
                            first_fail->max_err, first_fail->tolerance)};
  return {true, describe("%zu/%zu invariance and oracle checks pass",
                         passed, results.size())};
}

// 5. Metric fixed points: the 0.5-vs-0.6 PSNR oracle, SSIM self-identity
//    and symmetry of both metrics in both channel modes.
Outcome metric_oracles() {
  constexpr double kPsnrTol = 1e-4;
  constexpr double kIdentityTol = 1e-9;
  constexpr double kSymmetryTol = 1e-9;

  const Image half(32, 32, 0.5f);
  const Image sixty(32, 32, 0.6f);
  const double p_rgb = metrics::psnr(half, sixty, metrics::ChannelMode::Rgb);
  const double psnr_err = std::abs(p_rgb - 20.0);

  const Image u = textured_scene(48, 48, 321);
  const Image v = textured_scene(48, 48, 322);
  double id_err = 0.0, sym_err = 0.0;
  for (const auto mode :
       {metrics::ChannelMode::Rgb, metrics::ChannelMode::Y}) {
    id_err = std::max(id_err, std::abs(metrics::ssim(u, u, mode) - 1.0));
    sym_err = std::max(sym_err, std::abs(metrics::psnr(u, v, mode) -
                                         metrics::psnr(v, u, mode)));
    sym_err = std::max(sym_err, std::abs(metrics::ssim(u, v, mode) -
                                         metrics::ssim(v, u, mode)));
  }
  const bool pass = psnr_err <= kPsnrTol && id_err <= kIdentityTol &&
                    sym_err <= kSymmetryTol;
  return {pass,
          describe("psnr(0.5,0.6)=%.6f dB (tol %.0e), ssim identity err "
                   "%.1e, symmetry err %.1e",
                   p_rgb, kPsnrTol, id_err, sym_err)};
}

// 6. Two dataset runs from the same config, one serial and one with a
//    worker pool, must write byte-identical trees.
Outcome synthesis_determinism() {
  TempDir dir;
  write_image_pfm(textured_scene(48, 36, 600), dir.file("clean.pfm"));
  write_scalar_map(ramp_depth(48, 36, 601, 90.0), dir.file("depth.pfm"));

  nlohmann::json cfg;
  cfg["inputs"] = {{{"clean", dir.file("clean.pfm").string()},
                    {"depth", dir.file("depth.pfm").string()}}};
  cfg["counts"] = {{"haze", 2}, {"rain", 2}, {"snow", 2}};
  cfg["seed"] = 33;
  cfg["out_dir"] = dir.file("run_a").string();
  cfg["image_format"] = "png16";
  std::ofstream(dir.file("cfg.json")) << cfg.dump(2) << '\n';

  const CliResult a =
      run_cli("synth --config " + dir.file("cfg.json").string() + " --jobs 1");
  const CliResult b =
      run_cli("synth --config " + dir.file("cfg.json").string() +
              " --out-dir " + dir.file("run_b").string() + " --jobs 3");
  if (a.exit_code != 0 || b.exit_code != 0)
    return {false, describe("synth exited %d / %d: %s", a.exit_code,
                            b.exit_code, (a.err + b.err).c_str())};

  std::set<std::string> names_a, names_b;
  for (const auto& e : fs::directory_iterator(dir.file("run_a")))
    names_a.insert(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(dir.file("run_b")))
    names_b.insert(e.path().filename().string());
  if (names_a != names_b)
    return {false, describe("trees differ: %zu vs %zu files", names_a.size(),
                            names_b.size())};
  for (const std::string& name : names_a)
    if (slurp(dir.file("run_a") / name) != slurp(dir.file("run_b") / name))
      return {false, "file contents differ: " + name};
  return {true, describe("%zu files byte-identical across --jobs 1 and "
                         "--jobs 3",
                         names_a.size())};
}

// 7. The estimated-prior chain has to beat doing nothing on most sampled
//    haze fixtures.
Outcome estimated_restoration_sanity() {
  constexpr int kFixtures = 100;
  constexpr int kRequired = 90;

  int improved = 0;
  for (int i = 0; i < kFixtures; ++i) {
    const Image scene = sky_scene(96, 72, 5000 + i);
    const ScalarMap depth =
        ramp_depth(96, 72, 5200 + i, 100.0 + 30.0 * (i % 5));
    const synth::WeatherParams params =
        synth::sample_weather_params(8080, i, synth::WeatherClass::Haze);
    const synth::DegradedSample s =
        synth::synthesize_sample(scene, depth, params);
    const double before = metrics::psnr(s.degraded, s.clean);
    const restore::EstimatedRestoration est =
        restore::restore_with_estimated(s.degraded);
    const double after = metrics::psnr(est.restored, s.clean);
    if (after > before) ++improved;
  }
  return {improved >= kRequired,
          describe("%d/%d haze fixtures improved (need >= %d)", improved,
                   kFixtures, kRequired)};
}

// 8. Synthesis keeps up with dataset-scale generation.
Outcome synthesis_throughput() {
  constexpr double kRequiredPerMinute = 1000.0;
  constexpr std::size_t kPerClass = 40;

  TempDir dir;
  write_image_pfm(textured_scene(256, 256, 8800), dir.file("clean.pfm"));
  write_scalar_map(ramp_depth(256, 256, 8801, 150.0), dir.file("depth.pfm"));

  synth::DatasetConfig cfg;
  cfg.inputs = {{dir.file("clean.pfm").string(),
                 dir.file("depth.pfm").string()}};
  cfg.count_haze = cfg.count_rain = cfg.count_snow = kPerClass;
  cfg.seed = 99;
  cfg.out_dir = dir.file("out").string();
  cfg.image_format = synth::ImageFileFormat::Pfm;

  const auto start = Clock::now();
  const synth::DatasetSummary summary = synth::generate_dataset(cfg, 8);
  const double elapsed = seconds_since(start);
  const double per_minute =
      static_cast<double>(summary.sample_count) / elapsed * 60.0;
  return {per_minute >= kRequiredPerMinute,
          describe("%.0f samples/min at 256x256 with 8 workers (%zu in "
                   "%.1f s, need >= %.0f)",
                   per_minute, summary.sample_count, elapsed,
                   kRequiredPerMinute)};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {"oracle restoration round trip", round_trip_identity},
      {"special-case reductions", special_case_reductions},
      {"volumetric accumulation", volumetric_accumulation},
      {"attention invariances", attention_invariances},
      {"metric oracles", metric_oracles},
      {"synthesis determinism", synthesis_determinism},
      {"estimated restoration sanity", estimated_restoration_sanity},
      {"synthesis throughput", synthesis_throughput},
  };

  int failures = 0;
  int index = 0;
  for (const Entry& entry : entries) {
    ++index;
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& ex) {
      outcome = {false, std::string("exception: ") + ex.what()};
    }
    std::printf("criterion %d: %s  %s (%s)\n", index,
                outcome.pass ? "PASS" : "FAIL", entry.name,
                outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  const int total = static_cast<int>(std::size(entries));
  std::printf("%d/%d criteria passed\n", total - failures, total);
  return failures == 0 ? 0 : 1;
}
