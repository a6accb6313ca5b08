#include "weatherforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "weatherforge/errors.hpp"
#include "weatherforge/image_io.hpp"
#include "weatherforge/parallel.hpp"
#include "weatherforge/rng.hpp"

namespace weatherforge::synth {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(WeatherClass c) {
  switch (c) {
    case WeatherClass::Haze:
      return "haze";
    case WeatherClass::Rain:
      return "rain";
    case WeatherClass::Snow:
      return "snow";
  }
  throw ConfigError("unknown weather class");
}

std::string to_string(WeatherType t) {
  switch (t) {
    case WeatherType::Haze:
      return "haze";
    case WeatherType::Rain:
      return "rain";
    case WeatherType::RainHaze:
      return "rain_haze";
    case WeatherType::Snow:
      return "snow";
    case WeatherType::SnowHaze:
      return "snow_haze";
  }
  throw ConfigError("unknown weather type");
}

WeatherClass weather_class_from_string(const std::string& s) {
  if (s == "haze") return WeatherClass::Haze;
  if (s == "rain") return WeatherClass::Rain;
  if (s == "snow") return WeatherClass::Snow;
  throw ConfigError("unknown weather class '" + s + "'");
}

WeatherType weather_type_from_string(const std::string& s) {
  if (s == "haze") return WeatherType::Haze;
  if (s == "rain") return WeatherType::Rain;
  if (s == "rain_haze") return WeatherType::RainHaze;
  if (s == "snow") return WeatherType::Snow;
  if (s == "snow_haze") return WeatherType::SnowHaze;
  throw ConfigError("unknown weather type '" + s + "'");
}

bool scattering_active(WeatherType t) {
  return t == WeatherType::Haze || t == WeatherType::RainHaze ||
         t == WeatherType::SnowHaze;
}

WeatherClass base_class(WeatherType t) {
  switch (t) {
    case WeatherType::Haze:
      return WeatherClass::Haze;
    case WeatherType::Rain:
    case WeatherType::RainHaze:
      return WeatherClass::Rain;
    case WeatherType::Snow:
    case WeatherType::SnowHaze:
      return WeatherClass::Snow;
  }
  throw ConfigError("unknown weather type");
}

namespace {

double draw(SplitMix64& rng, const Range& r) { return rng.uniform(r.lo, r.hi); }

occlusion::LayerSpec sample_rain_layer(SplitMix64& rng,
                                       const SamplerRanges& rr, bool near,
                                       double shared_angle,
                                       std::uint64_t seed) {
  occlusion::LayerSpec spec;
  spec.kind = occlusion::ParticleKind::Rain;
  spec.density = draw(rng, near ? rr.rain_near_density : rr.rain_far_density);
  spec.length = draw(rng, near ? rr.rain_near_length : rr.rain_far_length);
  spec.width = draw(rng, near ? rr.rain_near_width : rr.rain_far_width);
  spec.blur_sigma = draw(rng, near ? rr.rain_near_blur : rr.rain_far_blur);
  spec.peak_alpha = draw(rng, near ? rr.rain_near_peak : rr.rain_far_peak);
  spec.angle_deg = shared_angle + rng.uniform(-2.0, 2.0);
  spec.seed = seed;
  return spec;
}

occlusion::LayerSpec sample_snow_layer(SplitMix64& rng,
                                       const SamplerRanges& rr, bool near,
                                       std::uint64_t seed) {
  occlusion::LayerSpec spec;
  spec.kind = occlusion::ParticleKind::Snow;
  spec.density = draw(rng, near ? rr.snow_near_density : rr.snow_far_density);
  spec.radius_min =
      draw(rng, near ? rr.snow_near_radius_min : rr.snow_far_radius_min);
  spec.radius_max =
      draw(rng, near ? rr.snow_near_radius_max : rr.snow_far_radius_max);
  spec.blur_sigma = draw(rng, near ? rr.snow_near_blur : rr.snow_far_blur);
  spec.peak_alpha = draw(rng, near ? rr.snow_near_peak : rr.snow_far_peak);
  spec.seed = seed;
  return spec;
}

}  // namespace

WeatherParams sample_weather_params(std::uint64_t master_seed,
                                    std::uint64_t index, WeatherClass cls,
                                    const SamplerRanges& ranges) {
  if (ranges.near_layer_count < 0 || ranges.far_layer_count < 0)
    throw ConfigError("layer counts must be non-negative");
  if (ranges.scatter_probability < 0.0 || ranges.scatter_probability > 1.0)
    throw ConfigError("scatter_probability must be in [0, 1]");

  const std::uint64_t stream_seed = derive_seed(master_seed, index);
  SplitMix64 rng(stream_seed);

  // Fixed draw order so parameter streams are reproducible even when ranges
  // collapse to a point: scatter coin, beta, light, brightness, gamma, then
  // the layer stack.
  const bool scatter_coin = rng.bernoulli(ranges.scatter_probability);
  const double beta = draw(rng, ranges.beta);
  const double light = draw(rng, ranges.atmospheric_light);
  const double brightness = draw(rng, ranges.occlusion_brightness);
  const double gamma = draw(rng, ranges.gamma);

  WeatherParams params;
  switch (cls) {
    case WeatherClass::Haze:
      params.type = WeatherType::Haze;
      break;
    case WeatherClass::Rain:
      params.type = scatter_coin ? WeatherType::RainHaze : WeatherType::Rain;
      break;
    case WeatherClass::Snow:
      params.type = scatter_coin ? WeatherType::SnowHaze : WeatherType::Snow;
      break;
  }
  params.atmosphere.light = static_cast<float>(light);
  params.atmosphere.beta = static_cast<float>(beta);
  params.occlusion_brightness = static_cast<float>(brightness);
  params.lowlight_gamma = static_cast<float>(gamma);
  params.seed = stream_seed;
  params.volumetric.beta = static_cast<float>(beta);

  if (cls != WeatherClass::Haze) {
    const bool rain = cls == WeatherClass::Rain;
    const double shared_angle = rain ? draw(rng, ranges.rain_angle) : 0.0;
    std::uint64_t ordinal = 0;
    for (int i = 0; i < ranges.near_layer_count; ++i) {
      const std::uint64_t seed = derive_seed(master_seed, index, ordinal++);
      params.volumetric.near_layers.push_back(
          rain ? sample_rain_layer(rng, ranges, true, shared_angle, seed)
               : sample_snow_layer(rng, ranges, true, seed));
    }
    for (int i = 0; i < ranges.far_layer_count; ++i) {
      const std::uint64_t seed = derive_seed(master_seed, index, ordinal++);
      params.volumetric.far_layers.push_back(
          rain ? sample_rain_layer(rng, ranges, false, shared_angle, seed)
               : sample_snow_layer(rng, ranges, false, seed));
    }
  }
  return params;
}

Image apply_low_light(const Image& img, float gamma) {
  if (!(gamma >= 1.0f))
    throw ConfigError("low-light gamma must be >= 1, got " +
                      std::to_string(gamma));
  if (gamma == 1.0f) return img;
  Image out(img.width(), img.height());
  auto src = img.samples();
  auto dst = out.samples();
  const double g = gamma;
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = static_cast<float>(
        std::pow(static_cast<double>(src[i]), g));
  return out;
}

Image invert_low_light(const Image& img, float gamma) {
  if (!(gamma >= 1.0f))
    throw ConfigError("low-light gamma must be >= 1, got " +
                      std::to_string(gamma));
  if (gamma == 1.0f) return img;
  Image out(img.width(), img.height());
  auto src = img.samples();
  auto dst = out.samples();
  const double inv = 1.0 / static_cast<double>(gamma);
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = static_cast<float>(
        std::pow(static_cast<double>(src[i]), inv));
  return out;
}

DegradedSample synthesize_sample(const Image& clean, const ScalarMap& depth,
                                 const WeatherParams& params) {
  require_same_shape(clean, depth, "clean image / depth map");

  DegradedSample sample;
  sample.params = params;
  sample.clean = apply_low_light(clean, params.lowlight_gamma);

  if (scattering_active(params.type)) {
    sample.transmission =
        scatter::transmission_from_depth(depth, params.atmosphere.beta);
  } else {
    sample.transmission.map = ScalarMap(depth.width(), depth.height(), 1.0f);
  }
  // With t = 1 this is exactly the identity, keeping the light-rain/snow
  // reduction bit-exact.
  Image background = scatter::scattering_composite(
      sample.clean, sample.transmission, params.atmosphere.light);

  sample.alpha = occlusion::volumetric_alpha(params.volumetric, depth);
  sample.degraded = occlusion::occlusion_composite(
      background, {sample.alpha, params.occlusion_brightness});
  return sample;
}

// --- JSON ------------------------------------------------------------------

namespace {

json layer_to_json(const occlusion::LayerSpec& s) {
  return json{{"kind", s.kind == occlusion::ParticleKind::Rain ? "rain"
                                                               : "snow"},
              {"density", s.density},
              {"angle_deg", s.angle_deg},
              {"length", s.length},
              {"width", s.width},
              {"radius_min", s.radius_min},
              {"radius_max", s.radius_max},
              {"blur_sigma", s.blur_sigma},
              {"peak_alpha", s.peak_alpha},
              {"seed", s.seed}};
}

occlusion::LayerSpec layer_from_json(const json& j) {
  occlusion::LayerSpec s;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "rain")
    s.kind = occlusion::ParticleKind::Rain;
  else if (kind == "snow")
    s.kind = occlusion::ParticleKind::Snow;
  else
    throw ConfigError("unknown particle kind '" + kind + "'");
  s.density = j.at("density").get<double>();
  s.angle_deg = j.at("angle_deg").get<double>();
  s.length = j.at("length").get<double>();
  s.width = j.at("width").get<double>();
  s.radius_min = j.at("radius_min").get<double>();
  s.radius_max = j.at("radius_max").get<double>();
  s.blur_sigma = j.at("blur_sigma").get<double>();
  s.peak_alpha = j.at("peak_alpha").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

json params_to_json(const WeatherParams& p) {
  json layers_near = json::array();
  for (const auto& l : p.volumetric.near_layers)
    layers_near.push_back(layer_to_json(l));
  json layers_far = json::array();
  for (const auto& l : p.volumetric.far_layers)
    layers_far.push_back(layer_to_json(l));
  return json{
      {"type", to_string(p.type)},
      {"atmosphere",
       {{"light", static_cast<double>(p.atmosphere.light)},
        {"beta", static_cast<double>(p.atmosphere.beta)}}},
      {"occlusion_brightness", static_cast<double>(p.occlusion_brightness)},
      {"lowlight_gamma", static_cast<double>(p.lowlight_gamma)},
      {"seed", p.seed},
      {"volumetric",
       {{"beta", static_cast<double>(p.volumetric.beta)},
        {"near_layers", layers_near},
        {"far_layers", layers_far}}}};
}

WeatherParams params_from_json(const json& j) {
  WeatherParams p;
  p.type = weather_type_from_string(j.at("type").get<std::string>());
  const auto& atm = j.at("atmosphere");
  p.atmosphere.light = static_cast<float>(atm.at("light").get<double>());
  p.atmosphere.beta = static_cast<float>(atm.at("beta").get<double>());
  p.occlusion_brightness =
      static_cast<float>(j.at("occlusion_brightness").get<double>());
  p.lowlight_gamma = static_cast<float>(j.at("lowlight_gamma").get<double>());
  p.seed = j.at("seed").get<std::uint64_t>();
  const auto& vol = j.at("volumetric");
  p.volumetric.beta = static_cast<float>(vol.at("beta").get<double>());
  for (const auto& l : vol.at("near_layers"))
    p.volumetric.near_layers.push_back(layer_from_json(l));
  for (const auto& l : vol.at("far_layers"))
    p.volumetric.far_layers.push_back(layer_from_json(l));
  return p;
}

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw ConfigError(std::string("invalid JSON in ") + what);
  return j;
}

json parse_json_file(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), what);
}

void apply_range_override(const json& j, const char* key, Range& r) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2)
    throw ConfigError(std::string("override '") + key +
                      "' must be a [lo, hi] pair");
  r.lo = v[0].get<double>();
  r.hi = v[1].get<double>();
  if (r.hi < r.lo)
    throw ConfigError(std::string("override '") + key + "' has hi < lo");
}

void apply_overrides(const json& j, SamplerRanges& r) {
  apply_range_override(j, "beta", r.beta);
  apply_range_override(j, "atmospheric_light", r.atmospheric_light);
  apply_range_override(j, "occlusion_brightness", r.occlusion_brightness);
  apply_range_override(j, "gamma", r.gamma);
  if (j.contains("scatter_probability"))
    r.scatter_probability = j.at("scatter_probability").get<double>();
  if (j.contains("near_layer_count"))
    r.near_layer_count = j.at("near_layer_count").get<int>();
  if (j.contains("far_layer_count"))
    r.far_layer_count = j.at("far_layer_count").get<int>();

  apply_range_override(j, "rain_angle", r.rain_angle);
  apply_range_override(j, "rain_near_density", r.rain_near_density);
  apply_range_override(j, "rain_near_length", r.rain_near_length);
  apply_range_override(j, "rain_near_width", r.rain_near_width);
  apply_range_override(j, "rain_near_blur", r.rain_near_blur);
  apply_range_override(j, "rain_near_peak", r.rain_near_peak);
  apply_range_override(j, "rain_far_density", r.rain_far_density);
  apply_range_override(j, "rain_far_length", r.rain_far_length);
  apply_range_override(j, "rain_far_width", r.rain_far_width);
  apply_range_override(j, "rain_far_blur", r.rain_far_blur);
  apply_range_override(j, "rain_far_peak", r.rain_far_peak);
  apply_range_override(j, "snow_near_density", r.snow_near_density);
  apply_range_override(j, "snow_near_radius_min", r.snow_near_radius_min);
  apply_range_override(j, "snow_near_radius_max", r.snow_near_radius_max);
  apply_range_override(j, "snow_near_blur", r.snow_near_blur);
  apply_range_override(j, "snow_near_peak", r.snow_near_peak);
  apply_range_override(j, "snow_far_density", r.snow_far_density);
  apply_range_override(j, "snow_far_radius_min", r.snow_far_radius_min);
  apply_range_override(j, "snow_far_radius_max", r.snow_far_radius_max);
  apply_range_override(j, "snow_far_blur", r.snow_far_blur);
  apply_range_override(j, "snow_far_peak", r.snow_far_peak);

  static const std::vector<std::string> known = {
      "beta", "atmospheric_light", "occlusion_brightness", "gamma",
      "scatter_probability", "near_layer_count", "far_layer_count",
      "rain_angle", "rain_near_density", "rain_near_length",
      "rain_near_width", "rain_near_blur", "rain_near_peak",
      "rain_far_density", "rain_far_length", "rain_far_width",
      "rain_far_blur", "rain_far_peak", "snow_near_density",
      "snow_near_radius_min", "snow_near_radius_max", "snow_near_blur",
      "snow_near_peak", "snow_far_density", "snow_far_radius_min",
      "snow_far_radius_max", "snow_far_blur", "snow_far_peak"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown override '" + key + "'");
  }
}

}  // namespace

std::string params_to_json_string(const WeatherParams& params, int indent) {
  return params_to_json(params).dump(indent);
}

WeatherParams params_from_json_string(const std::string& text) {
  return params_from_json(parse_json(text, "parameter record"));
}

WeatherParams params_from_json_file(const fs::path& path) {
  return params_from_json(parse_json_file(path, "parameter record"));
}

std::string to_string(ImageFileFormat f) {
  switch (f) {
    case ImageFileFormat::Png8:
      return "png8";
    case ImageFileFormat::Png16:
      return "png16";
    case ImageFileFormat::Pfm:
      return "pfm";
  }
  throw ConfigError("unknown image format");
}

ImageFileFormat image_format_from_string(const std::string& s) {
  if (s == "png8") return ImageFileFormat::Png8;
  if (s == "png16") return ImageFileFormat::Png16;
  if (s == "pfm") return ImageFileFormat::Pfm;
  throw ConfigError("unknown image format '" + s +
                    "' (expected png8, png16 or pfm)");
}

DatasetConfig dataset_config_from_json_string(const std::string& text) {
  const json j = parse_json(text, "dataset config");
  DatasetConfig cfg;
  if (!j.is_object()) throw ConfigError("dataset config must be an object");

  if (!j.contains("inputs") || !j.at("inputs").is_array() ||
      j.at("inputs").empty())
    throw ConfigError("dataset config needs a non-empty 'inputs' array");
  for (const auto& entry : j.at("inputs")) {
    DatasetInputPair pair;
    pair.clean = entry.at("clean").get<std::string>();
    pair.depth = entry.at("depth").get<std::string>();
    cfg.inputs.push_back(std::move(pair));
  }

  if (!j.contains("counts") || !j.at("counts").is_object())
    throw ConfigError("dataset config needs a 'counts' object");
  const auto& counts = j.at("counts");
  auto read_count = [&](const char* key) -> std::size_t {
    if (!counts.contains(key)) return 0;
    const auto v = counts.at(key).get<std::int64_t>();
    if (v < 0) throw ConfigError(std::string("counts.") + key + " < 0");
    return static_cast<std::size_t>(v);
  };
  cfg.count_haze = read_count("haze");
  cfg.count_rain = read_count("rain");
  cfg.count_snow = read_count("snow");

  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (!j.contains("out_dir"))
    throw ConfigError("dataset config needs 'out_dir'");
  cfg.out_dir = j.at("out_dir").get<std::string>();
  if (cfg.out_dir.empty()) throw ConfigError("'out_dir' must not be empty");
  if (j.contains("image_format"))
    cfg.image_format =
        image_format_from_string(j.at("image_format").get<std::string>());
  if (j.contains("overrides")) {
    if (!j.at("overrides").is_object())
      throw ConfigError("'overrides' must be an object");
    apply_overrides(j.at("overrides"), cfg.ranges);
  }
  return cfg;
}

DatasetConfig load_dataset_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return dataset_config_from_json_string(buf.str());
}

// --- dataset generation ----------------------------------------------------

namespace {

constexpr int kManifestSchemaVersion = 1;

std::string sample_name(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05zu", index);
  return buf;
}

struct LoadedInput {
  Image clean;
  ScalarMap depth;
};

// Files written for one sample; used both for the manifest and for cleanup
// when synthesis fails half-way.
struct SampleFiles {
  std::string lq, gt, t, alpha, meta;
};

SampleFiles sample_files(const std::string& name, ImageFileFormat fmt) {
  const std::string ext = fmt == ImageFileFormat::Pfm ? ".pfm" : ".png";
  return {name + "_lq" + ext, name + "_gt" + ext, name + "_t.pfm",
          name + "_alpha.pfm", name + "_meta.json"};
}

void write_sample_image(const Image& img, const fs::path& path,
                        ImageFileFormat fmt) {
  switch (fmt) {
    case ImageFileFormat::Png8:
      write_image(img, path, 8);
      return;
    case ImageFileFormat::Png16:
      write_image(img, path, 16);
      return;
    case ImageFileFormat::Pfm:
      write_image_pfm(img, path);
      return;
  }
  throw ConfigError("unknown image format");
}

}  // namespace

DatasetSummary generate_dataset(const DatasetConfig& config, int jobs) {
  const std::size_t total =
      config.count_haze + config.count_rain + config.count_snow;
  if (config.inputs.empty())
    throw ConfigError("dataset config has no inputs");
  if (config.out_dir.empty()) throw ConfigError("out_dir must not be empty");

  const fs::path out_dir = config.out_dir;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw IoError("cannot create output directory " + out_dir.string() +
                  ": " + ec.message());

  // Inputs are shared read-only across workers; load each pair once.
  std::vector<LoadedInput> inputs;
  inputs.reserve(config.inputs.size());
  for (const auto& pair : config.inputs) {
    LoadedInput in;
    in.clean = read_image(pair.clean);
    in.depth = read_scalar_map(pair.depth);
    if (!same_shape(in.clean, in.depth))
      throw ShapeError("input pair shape mismatch: " + pair.clean + " is " +
                       std::to_string(in.clean.width()) + "x" +
                       std::to_string(in.clean.height()) + ", " + pair.depth +
                       " is " + std::to_string(in.depth.width()) + "x" +
                       std::to_string(in.depth.height()));
    inputs.push_back(std::move(in));
  }

  auto class_of = [&](std::size_t index) {
    if (index < config.count_haze) return WeatherClass::Haze;
    if (index < config.count_haze + config.count_rain)
      return WeatherClass::Rain;
    return WeatherClass::Snow;
  };

  // Manifest entries are produced concurrently but keyed by index, so the
  // final document is independent of completion order.
  std::vector<json> entries(total);

  parallel_for(total, jobs, [&](std::size_t index) {
    const std::string name = sample_name(index);
    const SampleFiles files = sample_files(name, config.image_format);
    const std::size_t input_index = index % config.inputs.size();
    try {
      const WeatherParams params =
          sample_weather_params(config.seed, index, class_of(index),
                                config.ranges);
      const LoadedInput& input = inputs[input_index];
      const DegradedSample sample =
          synthesize_sample(input.clean, input.depth, params);

      write_sample_image(sample.degraded, out_dir / files.lq,
                         config.image_format);
      write_sample_image(sample.clean, out_dir / files.gt,
                         config.image_format);
      write_scalar_map(sample.transmission.map, out_dir / files.t);
      write_scalar_map(sample.alpha, out_dir / files.alpha);

      json meta = params_to_json(params);
      meta["index"] = index;
      meta["name"] = name;
      meta["clean_source"] = config.inputs[input_index].clean;
      meta["depth_source"] = config.inputs[input_index].depth;
      {
        std::ofstream out(out_dir / files.meta, std::ios::binary);
        if (!out)
          throw IoError("cannot write " + (out_dir / files.meta).string());
        out << meta.dump(2) << '\n';
      }

      json entry;
      entry["index"] = index;
      entry["name"] = name;
      entry["weather"] = to_string(params.type);
      entry["clean_source"] = config.inputs[input_index].clean;
      entry["depth_source"] = config.inputs[input_index].depth;
      entry["files"] = {{"lq", files.lq},
                        {"gt", files.gt},
                        {"transmission", files.t},
                        {"alpha", files.alpha},
                        {"meta", files.meta}};
      entry["params"] = params_to_json(params);
      entries[index] = std::move(entry);
    } catch (...) {
      for (const std::string& f :
           {files.lq, files.gt, files.t, files.alpha, files.meta}) {
        std::error_code rm_ec;
        fs::remove(out_dir / f, rm_ec);
      }
      try {
        throw;
      } catch (const Error& e) {
        throw Error("sample " + name + " (input " +
                    config.inputs[input_index].clean + "): " + e.what());
      }
    }
  });

  json manifest;
  manifest["schema_version"] = kManifestSchemaVersion;
  manifest["seed"] = config.seed;
  manifest["image_format"] = to_string(config.image_format);
  manifest["counts"] = {{"haze", config.count_haze},
                        {"rain", config.count_rain},
                        {"snow", config.count_snow}};
  manifest["sample_count"] = total;
  manifest["samples"] = json::array();
  for (auto& e : entries) manifest["samples"].push_back(std::move(e));

  const fs::path manifest_path = out_dir / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + manifest_path.string());
  out << manifest.dump(2) << '\n';
  out.close();

  return {total, manifest_path};
}

}  // namespace weatherforge::synth
