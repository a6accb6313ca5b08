#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "test_support.hpp"
#include "weatherforge/errors.hpp"
#include "weatherforge/image_io.hpp"
#include "weatherforge/rng.hpp"
#include "weatherforge/synth.hpp"

using namespace weatherforge;
using namespace weatherforge::synth;
namespace fs = std::filesystem;

namespace {

bool layer_equal(const occlusion::LayerSpec& a, const occlusion::LayerSpec& b) {
  return a.kind == b.kind && a.density == b.density &&
         a.angle_deg == b.angle_deg && a.length == b.length &&
         a.width == b.width && a.radius_min == b.radius_min &&
         a.radius_max == b.radius_max && a.blur_sigma == b.blur_sigma &&
         a.peak_alpha == b.peak_alpha && a.seed == b.seed;
}

bool params_equal(const WeatherParams& a, const WeatherParams& b) {
  if (a.type != b.type || a.atmosphere.light != b.atmosphere.light ||
      a.atmosphere.beta != b.atmosphere.beta ||
      a.occlusion_brightness != b.occlusion_brightness ||
      a.lowlight_gamma != b.lowlight_gamma || a.seed != b.seed ||
      a.volumetric.beta != b.volumetric.beta)
    return false;
  if (a.volumetric.near_layers.size() != b.volumetric.near_layers.size() ||
      a.volumetric.far_layers.size() != b.volumetric.far_layers.size())
    return false;
  for (std::size_t i = 0; i < a.volumetric.near_layers.size(); ++i)
    if (!layer_equal(a.volumetric.near_layers[i], b.volumetric.near_layers[i]))
      return false;
  for (std::size_t i = 0; i < a.volumetric.far_layers.size(); ++i)
    if (!layer_equal(a.volumetric.far_layers[i], b.volumetric.far_layers[i]))
      return false;
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes one clean/depth input pair and returns a config JSON skeleton.
struct DatasetFixture {
  testsupport::TempDir dir;
  std::string clean_path, depth_path;

  DatasetFixture(int w, int h, std::uint64_t seed) {
    const Image clean = testsupport::textured_scene(w, h, seed);
    const ScalarMap depth = testsupport::ramp_depth(w, h, seed + 1, 80.0);
    clean_path = dir.file("clean.pfm").string();
    depth_path = dir.file("depth.pfm").string();
    write_image_pfm(clean, clean_path);
    write_scalar_map(depth, depth_path);
  }

  DatasetConfig config(const std::string& out_name, std::uint64_t seed,
                       std::size_t haze, std::size_t rain,
                       std::size_t snow) const {
    DatasetConfig cfg;
    cfg.inputs.push_back({clean_path, depth_path});
    cfg.count_haze = haze;
    cfg.count_rain = rain;
    cfg.count_snow = snow;
    cfg.seed = seed;
    cfg.out_dir = (dir.path() / out_name).string();
    cfg.image_format = ImageFileFormat::Pfm;
    return cfg;
  }
};

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("weather names round-trip") {
  for (WeatherClass c :
       {WeatherClass::Haze, WeatherClass::Rain, WeatherClass::Snow})
    CHECK(weather_class_from_string(to_string(c)) == c);
  for (WeatherType t :
       {WeatherType::Haze, WeatherType::Rain, WeatherType::RainHaze,
        WeatherType::Snow, WeatherType::SnowHaze})
    CHECK(weather_type_from_string(to_string(t)) == t);
  CHECK(to_string(WeatherType::RainHaze) == "rain_haze");
  CHECK_THROWS_AS((void)weather_type_from_string("drizzle"), ConfigError);
  CHECK_THROWS_AS((void)weather_class_from_string("rain_haze"), ConfigError);
}

TEST_CASE("type predicates") {
  CHECK(scattering_active(WeatherType::Haze));
  CHECK(scattering_active(WeatherType::RainHaze));
  CHECK(scattering_active(WeatherType::SnowHaze));
  CHECK(!scattering_active(WeatherType::Rain));
  CHECK(!scattering_active(WeatherType::Snow));
  CHECK(base_class(WeatherType::RainHaze) == WeatherClass::Rain);
  CHECK(base_class(WeatherType::SnowHaze) == WeatherClass::Snow);
  CHECK(base_class(WeatherType::Haze) == WeatherClass::Haze);
}

TEST_CASE("sampler is deterministic in (seed, index, class)") {
  const WeatherParams a = sample_weather_params(99, 7, WeatherClass::Rain);
  const WeatherParams b = sample_weather_params(99, 7, WeatherClass::Rain);
  CHECK(params_equal(a, b));
  const WeatherParams c = sample_weather_params(99, 8, WeatherClass::Rain);
  CHECK(!params_equal(a, c));
  CHECK(a.seed != c.seed);
}

TEST_CASE("sampler replays the documented draw order") {
  const std::uint64_t master = 1234, index = 5;
  const WeatherParams p = sample_weather_params(master, index, WeatherClass::Snow);

  SplitMix64 rng(derive_seed(master, index));
  const SamplerRanges rr;
  const bool coin = rng.bernoulli(rr.scatter_probability);
  const auto beta = static_cast<float>(rng.uniform(rr.beta.lo, rr.beta.hi));
  const auto light = static_cast<float>(
      rng.uniform(rr.atmospheric_light.lo, rr.atmospheric_light.hi));
  const auto bright = static_cast<float>(
      rng.uniform(rr.occlusion_brightness.lo, rr.occlusion_brightness.hi));
  const auto gamma = static_cast<float>(rng.uniform(rr.gamma.lo, rr.gamma.hi));

  CHECK(p.type == (coin ? WeatherType::SnowHaze : WeatherType::Snow));
  CHECK(p.atmosphere.beta == beta);
  CHECK(p.atmosphere.light == light);
  CHECK(p.occlusion_brightness == bright);
  CHECK(p.lowlight_gamma == gamma);
  CHECK(p.seed == derive_seed(master, index));
  CHECK(p.volumetric.beta == beta);

  // Snow layers continue on the same stream, near stack first.
  REQUIRE(p.volumetric.near_layers.size() == 1);
  REQUIRE(p.volumetric.far_layers.size() == 4);
  const auto& near0 = p.volumetric.near_layers[0];
  CHECK(near0.density ==
        rng.uniform(rr.snow_near_density.lo, rr.snow_near_density.hi));
  CHECK(near0.radius_min ==
        rng.uniform(rr.snow_near_radius_min.lo, rr.snow_near_radius_min.hi));
  CHECK(near0.radius_max ==
        rng.uniform(rr.snow_near_radius_max.lo, rr.snow_near_radius_max.hi));
  CHECK(near0.blur_sigma ==
        rng.uniform(rr.snow_near_blur.lo, rr.snow_near_blur.hi));
  CHECK(near0.peak_alpha ==
        rng.uniform(rr.snow_near_peak.lo, rr.snow_near_peak.hi));
  CHECK(near0.seed == derive_seed(master, index, 0));
  CHECK(p.volumetric.far_layers[0].seed == derive_seed(master, index, 1));
  CHECK(p.volumetric.far_layers[3].seed == derive_seed(master, index, 4));
}

TEST_CASE("sampled values respect their ranges") {
  const SamplerRanges rr;
  for (std::uint64_t i = 0; i < 40; ++i) {
    const WeatherParams p = sample_weather_params(7, i, WeatherClass::Rain);
    CHECK(p.atmosphere.beta >= rr.beta.lo);
    CHECK(p.atmosphere.beta <= rr.beta.hi);
    CHECK(p.atmosphere.light >= rr.atmospheric_light.lo);
    CHECK(p.atmosphere.light <= rr.atmospheric_light.hi);
    CHECK(p.occlusion_brightness >= rr.occlusion_brightness.lo);
    CHECK(p.occlusion_brightness <= rr.occlusion_brightness.hi);
    CHECK(p.lowlight_gamma >= rr.gamma.lo);
    CHECK(p.lowlight_gamma <= rr.gamma.hi);
    for (const auto& l : p.volumetric.near_layers) {
      CHECK(l.kind == occlusion::ParticleKind::Rain);
      CHECK(l.density >= rr.rain_near_density.lo);
      CHECK(l.density <= rr.rain_near_density.hi);
      // Per-layer jitter widens the shared angle range by 2 degrees.
      CHECK(l.angle_deg >= rr.rain_angle.lo - 2.0);
      CHECK(l.angle_deg <= rr.rain_angle.hi + 2.0);
      CHECK(l.length >= l.width);
    }
    for (const auto& l : p.volumetric.far_layers) {
      CHECK(l.density >= rr.rain_far_density.lo);
      CHECK(l.density <= rr.rain_far_density.hi);
    }
  }
  const WeatherParams hz = sample_weather_params(7, 0, WeatherClass::Haze);
  CHECK(hz.type == WeatherType::Haze);
  CHECK(hz.volumetric.empty());
}

TEST_CASE("scatter coin lands near its probability") {
  int with_haze = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const WeatherParams p =
        sample_weather_params(1001, static_cast<std::uint64_t>(i),
                              WeatherClass::Rain);
    if (p.type == WeatherType::RainHaze) ++with_haze;
  }
  const double frac = static_cast<double>(with_haze) / n;
  CHECK(frac > 0.46);  // ~4 sigma around 0.5 for n = 2000
  CHECK(frac < 0.54);

  SamplerRanges sure;
  sure.scatter_probability = 1.0;
  CHECK(sample_weather_params(1, 0, WeatherClass::Snow, sure).type ==
        WeatherType::SnowHaze);
  sure.scatter_probability = 0.0;
  CHECK(sample_weather_params(1, 0, WeatherClass::Snow, sure).type ==
        WeatherType::Snow);
}

TEST_CASE("low-light adjustment") {
  Image img = Image::from_data(2, 1, {0.5f, 0.25f, 1.0f, 0.0f, 0.9f, 0.1f});
  const Image same = apply_low_light(img, 1.0f);
  for (std::size_t i = 0; i < img.sample_count(); ++i)
    CHECK(same.samples()[i] == img.samples()[i]);

  const Image dark = apply_low_light(img, 2.0f);
  CHECK(dark(0, 0, 0) == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(dark(0, 0, 1) == doctest::Approx(0.0625).epsilon(1e-7));
  CHECK(dark(0, 0, 2) == 1.0f);
  CHECK(dark(1, 0, 0) == 0.0f);
  for (std::size_t i = 0; i < img.sample_count(); ++i)
    CHECK(dark.samples()[i] <= img.samples()[i]);  // gamma > 1 darkens

  const Image restored = invert_low_light(dark, 2.0f);
  for (std::size_t i = 0; i < img.sample_count(); ++i)
    CHECK(std::abs(restored.samples()[i] - img.samples()[i]) <= 1e-6f);

  CHECK_THROWS_AS((void)apply_low_light(img, 0.5f), ConfigError);
  CHECK_THROWS_AS((void)invert_low_light(img, 0.0f), ConfigError);
}

TEST_CASE("haze samples reduce to the scattering composite") {
  const Image clean = testsupport::textured_scene(20, 16, 200);
  const ScalarMap depth = testsupport::ramp_depth(20, 16, 201, 70.0);
  WeatherParams p = sample_weather_params(55, 0, WeatherClass::Haze);
  const DegradedSample s = synthesize_sample(clean, depth, p);

  CHECK(s.params.type == WeatherType::Haze);
  for (float a : s.alpha.samples()) CHECK(a == 0.0f);

  const auto t = scatter::transmission_from_depth(depth, p.atmosphere.beta);
  const Image expect =
      scatter::scattering_composite(s.clean, t, p.atmosphere.light);
  for (std::size_t i = 0; i < expect.sample_count(); ++i)
    CHECK(s.degraded.samples()[i] == expect.samples()[i]);
}

TEST_CASE("light rain keeps full transmission and reduces to matting") {
  const Image clean = testsupport::textured_scene(20, 16, 210);
  const ScalarMap depth = testsupport::ramp_depth(20, 16, 211, 70.0);
  SamplerRanges rr;
  rr.scatter_probability = 0.0;  // force plain rain
  const WeatherParams p = sample_weather_params(56, 0, WeatherClass::Rain, rr);
  REQUIRE(p.type == WeatherType::Rain);
  const DegradedSample s = synthesize_sample(clean, depth, p);

  for (float t : s.transmission.map.samples()) CHECK(t == 1.0f);

  const ScalarMap alpha = occlusion::volumetric_alpha(p.volumetric, depth);
  for (std::size_t i = 0; i < alpha.size(); ++i)
    CHECK(s.alpha[i] == alpha[i]);
  const Image expect = occlusion::occlusion_composite(
      s.clean, {alpha, p.occlusion_brightness});
  for (std::size_t i = 0; i < expect.sample_count(); ++i)
    CHECK(s.degraded.samples()[i] == expect.samples()[i]);
}

TEST_CASE("stored intermediates recompose the degraded image exactly") {
  const Image clean = testsupport::textured_scene(24, 18, 220);
  const ScalarMap depth = testsupport::ramp_depth(24, 18, 221, 90.0);
  SamplerRanges rr;
  rr.scatter_probability = 1.0;  // force the combined rain_haze path
  const WeatherParams p = sample_weather_params(57, 3, WeatherClass::Rain, rr);
  REQUIRE(p.type == WeatherType::RainHaze);
  const DegradedSample s = synthesize_sample(clean, depth, p);

  const Image b = scatter::scattering_composite(s.clean, s.transmission,
                                                p.atmosphere.light);
  const Image i2 =
      occlusion::occlusion_composite(b, {s.alpha, p.occlusion_brightness});
  for (std::size_t i = 0; i < i2.sample_count(); ++i)
    CHECK(s.degraded.samples()[i] == i2.samples()[i]);

  // And the clean channel is the low-light-adjusted input.
  const Image gt = apply_low_light(clean, p.lowlight_gamma);
  for (std::size_t i = 0; i < gt.sample_count(); ++i)
    CHECK(s.clean.samples()[i] == gt.samples()[i]);
}

TEST_CASE("synthesize_sample rejects mismatched inputs") {
  const Image clean = testsupport::textured_scene(8, 8, 1);
  const ScalarMap depth(7, 8, 10.0f);
  CHECK_THROWS_AS((void)synthesize_sample(clean, depth, WeatherParams{}),
                  ShapeError);
}

TEST_CASE("parameter records survive a JSON round-trip") {
  const WeatherParams p = sample_weather_params(404, 2, WeatherClass::Rain);
  const std::string text = params_to_json_string(p);
  const WeatherParams q = params_from_json_string(text);
  CHECK(params_equal(p, q));

  CHECK_THROWS_AS((void)params_from_json_string("{nonsense"), ConfigError);
  CHECK_THROWS_AS((void)params_from_json_string("{}"), std::exception);
}

TEST_CASE("dataset config parsing") {
  const std::string good = R"({
    "inputs": [{"clean": "a.png", "depth": "a_depth.pfm"}],
    "counts": {"haze": 3, "rain": 2},
    "seed": 17,
    "out_dir": "out",
    "image_format": "png16",
    "overrides": {"beta": [0.01, 0.02], "far_layer_count": 2}
  })";
  const DatasetConfig cfg = dataset_config_from_json_string(good);
  CHECK(cfg.inputs.size() == 1);
  CHECK(cfg.inputs[0].clean == "a.png");
  CHECK(cfg.count_haze == 3);
  CHECK(cfg.count_rain == 2);
  CHECK(cfg.count_snow == 0);
  CHECK(cfg.seed == 17);
  CHECK(cfg.image_format == ImageFileFormat::Png16);
  CHECK(cfg.ranges.beta.lo == 0.01);
  CHECK(cfg.ranges.beta.hi == 0.02);
  CHECK(cfg.ranges.far_layer_count == 2);
  CHECK(cfg.ranges.gamma.lo == 1.0);  // untouched default

  CHECK_THROWS_AS(
      (void)dataset_config_from_json_string(R"({"counts": {}, "out_dir": "o"})"),
      ConfigError);
  CHECK_THROWS_AS((void)dataset_config_from_json_string(R"({
    "inputs": [{"clean": "a", "depth": "b"}], "counts": {}, "out_dir": "o",
    "overrides": {"betta": [0, 1]}})"),
                  ConfigError);
  CHECK_THROWS_AS((void)dataset_config_from_json_string(R"({
    "inputs": [{"clean": "a", "depth": "b"}], "counts": {}, "out_dir": "o",
    "overrides": {"beta": [0.5, 0.1]}})"),
                  ConfigError);
  CHECK_THROWS_AS((void)dataset_config_from_json_string(R"({
    "inputs": [{"clean": "a", "depth": "b"}], "counts": {"haze": -1},
    "out_dir": "o"})"),
                  ConfigError);
}

TEST_CASE("generated dataset tree: layout, manifest and meta agree") {
  DatasetFixture fx(24, 20, 300);
  const DatasetConfig cfg = fx.config("ds", 42, 2, 2, 1);
  const DatasetSummary summary = generate_dataset(cfg, 1);
  CHECK(summary.sample_count == 5);
  REQUIRE(fs::exists(summary.manifest_path));

  const auto manifest = nlohmann::json::parse(slurp(summary.manifest_path));
  CHECK(manifest.at("schema_version") == 1);
  CHECK(manifest.at("seed") == 42);
  CHECK(manifest.at("image_format") == "pfm");
  CHECK(manifest.at("sample_count") == 5);
  CHECK(manifest.at("counts").at("haze") == 2);
  REQUIRE(manifest.at("samples").size() == 5);

  const std::vector<WeatherClass> expect_class = {
      WeatherClass::Haze, WeatherClass::Haze, WeatherClass::Rain,
      WeatherClass::Rain, WeatherClass::Snow};
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& entry = manifest.at("samples").at(i);
    CHECK(entry.at("index") == i);
    const std::string weather = entry.at("weather").get<std::string>();
    CHECK(base_class(weather_type_from_string(weather)) == expect_class[i]);
    for (const char* key : {"lq", "gt", "transmission", "alpha", "meta"}) {
      const fs::path f =
          fs::path(cfg.out_dir) / entry.at("files").at(key).get<std::string>();
      CHECK(fs::exists(f));
    }
    // The meta sidecar must replay into the exact sampled parameters.
    const fs::path meta_path =
        fs::path(cfg.out_dir) /
        entry.at("files").at("meta").get<std::string>();
    const WeatherParams from_meta = params_from_json_file(meta_path);
    const WeatherParams resampled =
        sample_weather_params(cfg.seed, i, expect_class[i], cfg.ranges);
    CHECK(params_equal(from_meta, resampled));
  }
}

TEST_CASE("stored pfm channels reproduce the synthesis bit-exactly") {
  DatasetFixture fx(24, 20, 310);
  const DatasetConfig cfg = fx.config("ds", 8, 0, 1, 0);
  (void)generate_dataset(cfg, 1);

  const Image clean_in = read_image(fx.clean_path);
  const ScalarMap depth_in = read_scalar_map(fx.depth_path);
  const WeatherParams params = params_from_json_file(
      fs::path(cfg.out_dir) / "00000_meta.json");
  const DegradedSample s = synthesize_sample(clean_in, depth_in, params);

  const Image lq = read_image(fs::path(cfg.out_dir) / "00000_lq.pfm");
  const Image gt = read_image(fs::path(cfg.out_dir) / "00000_gt.pfm");
  const ScalarMap t = read_scalar_map(fs::path(cfg.out_dir) / "00000_t.pfm");
  const ScalarMap a =
      read_scalar_map(fs::path(cfg.out_dir) / "00000_alpha.pfm");
  for (std::size_t i = 0; i < lq.sample_count(); ++i)
    CHECK(lq.samples()[i] == s.degraded.samples()[i]);
  for (std::size_t i = 0; i < gt.sample_count(); ++i)
    CHECK(gt.samples()[i] == s.clean.samples()[i]);
  for (std::size_t i = 0; i < t.size(); ++i)
    CHECK(t[i] == s.transmission.map.samples()[i]);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i] == s.alpha.samples()[i]);
}

TEST_CASE("dataset trees are byte-identical across runs and job counts") {
  DatasetFixture fx(20, 16, 320);
  const DatasetConfig cfg_a = fx.config("run_a", 99, 1, 1, 1);
  DatasetConfig cfg_b = cfg_a;
  cfg_b.out_dir = (fx.dir.path() / "run_b").string();
  (void)generate_dataset(cfg_a, 1);
  (void)generate_dataset(cfg_b, 3);

  std::set<std::string> names_a, names_b;
  for (const auto& e : fs::directory_iterator(cfg_a.out_dir))
    names_a.insert(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(cfg_b.out_dir))
    names_b.insert(e.path().filename().string());
  REQUIRE(names_a == names_b);
  CHECK(names_a.size() == 3 * 5 + 1);
  for (const std::string& name : names_a)
    CHECK(slurp(fs::path(cfg_a.out_dir) / name) ==
          slurp(fs::path(cfg_b.out_dir) / name));
}

TEST_CASE("dataset generation rejects unreadable or mismatched inputs") {
  DatasetFixture fx(16, 12, 330);
  DatasetConfig cfg = fx.config("ds", 1, 1, 0, 0);
  cfg.inputs[0].depth = fx.dir.file("missing.pfm").string();
  CHECK_THROWS_AS((void)generate_dataset(cfg, 1), IoError);

  // Mismatched pair: depth from a different-size scene.
  DatasetFixture other(8, 8, 331);
  cfg.inputs[0].depth = other.depth_path;
  CHECK_THROWS_AS((void)generate_dataset(cfg, 1), ShapeError);
}

}  // TEST_SUITE
