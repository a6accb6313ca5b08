#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "weatherforge/image.hpp"
#include "weatherforge/occlusion.hpp"
#include "weatherforge/scatter.hpp"

namespace weatherforge::synth {

// The class requested from the sampler (dataset counts are per class) and
// the resolved per-sample type: rain/snow samples pick up scattering with
// probability scatter_probability and become rain_haze/snow_haze.
enum class WeatherClass { Haze, Rain, Snow };
enum class WeatherType { Haze, Rain, RainHaze, Snow, SnowHaze };

std::string to_string(WeatherClass c);
std::string to_string(WeatherType t);
WeatherClass weather_class_from_string(const std::string& s);
WeatherType weather_type_from_string(const std::string& s);

// Haze, rain_haze and snow_haze apply the transmission composite; light rain
// and snow keep t = 1.
bool scattering_active(WeatherType t);
WeatherClass base_class(WeatherType t);

// One sample's full degradation recipe.
struct WeatherParams {
  WeatherType type = WeatherType::Haze;
  scatter::Atmosphere atmosphere;  // A and beta; beta also weights the far
                                   // particle stack even when t = 1
  occlusion::VolumetricConfig volumetric;  // empty for haze
  float occlusion_brightness = 0.9f;       // O
  float lowlight_gamma = 1.0f;             // >= 1, 1 = no adjustment
  std::uint64_t seed = 0;                  // per-sample stream seed
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Every sampled quantity and its default range. beta, atmospheric_light and
// scatter_probability follow the published synthesis recipe; the procedural
// layer ranges are this artifact's own defaults. All overridable from the
// dataset config JSON under "overrides" (same key names as the fields).
struct SamplerRanges {
  Range beta{0.005, 0.03};
  Range atmospheric_light{0.75, 1.0};
  Range occlusion_brightness{0.8, 1.0};
  Range gamma{1.0, 2.2};
  double scatter_probability = 0.5;
  int near_layer_count = 1;
  int far_layer_count = 4;

  Range rain_angle{-20.0, 20.0};
  Range rain_near_density{20.0, 60.0};
  Range rain_near_length{20.0, 40.0};
  Range rain_near_width{1.5, 3.0};
  Range rain_near_blur{0.4, 0.8};
  Range rain_near_peak{0.35, 0.6};
  Range rain_far_density{100.0, 300.0};
  Range rain_far_length{8.0, 18.0};
  Range rain_far_width{1.0, 1.8};
  Range rain_far_blur{0.3, 0.6};
  Range rain_far_peak{0.15, 0.35};

  Range snow_near_density{30.0, 80.0};
  Range snow_near_radius_min{1.5, 2.5};
  Range snow_near_radius_max{3.5, 5.5};
  Range snow_near_blur{0.3, 0.8};
  Range snow_near_peak{0.5, 0.8};
  Range snow_far_density{150.0, 400.0};
  Range snow_far_radius_min{0.6, 1.0};
  Range snow_far_radius_max{1.6, 2.6};
  Range snow_far_blur{0.2, 0.5};
  Range snow_far_peak{0.2, 0.4};
};

// Draws one sample's parameters. Deterministic in (master_seed, index): the
// parameter stream is SplitMix64(derive_seed(master_seed, index)) and the
// draws happen in a fixed documented order (scatter coin, beta, light,
// brightness, gamma, then layer parameters near-to-far). Per-layer render
// seeds are derive_seed(master_seed, index, layer_ordinal).
WeatherParams sample_weather_params(std::uint64_t master_seed,
                                    std::uint64_t index, WeatherClass cls,
                                    const SamplerRanges& ranges = {});

// out = J^gamma per sample; gamma = 1 is the identity. Throws ConfigError
// for gamma < 1.
Image apply_low_light(const Image& img, float gamma);

// Inverse adjustment, out = J^(1/gamma); same gamma constraint.
Image invert_low_light(const Image& img, float gamma);

// A synthesized sample with every intermediate the inversion needs.
struct DegradedSample {
  Image degraded;                    // I
  Image clean;                       // the pre-weather scene (post low-light)
  scatter::TransmissionMap transmission;  // t (all ones when inactive)
  ScalarMap alpha;                   // particle coverage (all zeros for haze)
  WeatherParams params;
};

// Full pipeline: low-light adjust, transmission, scattering composite,
// volumetric occlusion, occlusion composite.
DegradedSample synthesize_sample(const Image& clean, const ScalarMap& depth,
                                 const WeatherParams& params);

// --- dataset generation ----------------------------------------------------

struct DatasetInputPair {
  std::string clean;  // PNG or color PFM
  std::string depth;  // single-channel PFM, meters
};

enum class ImageFileFormat { Png8, Png16, Pfm };
std::string to_string(ImageFileFormat f);
ImageFileFormat image_format_from_string(const std::string& s);

struct DatasetConfig {
  std::vector<DatasetInputPair> inputs;
  std::size_t count_haze = 0;
  std::size_t count_rain = 0;
  std::size_t count_snow = 0;
  std::uint64_t seed = 0;
  std::string out_dir;
  ImageFileFormat image_format = ImageFileFormat::Png8;
  SamplerRanges ranges;
};

// Parses the dataset config JSON (keys: inputs, counts, seed, out_dir,
// image_format, overrides). Relative paths are taken as given, i.e.
// resolved against the working directory.
DatasetConfig load_dataset_config(const std::filesystem::path& path);
DatasetConfig dataset_config_from_json_string(const std::string& text);

struct DatasetSummary {
  std::size_t sample_count = 0;
  std::filesystem::path manifest_path;
};

// Writes NNNNN_{lq,gt}.{png|pfm}, NNNNN_t.pfm, NNNNN_alpha.pfm and
// NNNNN_meta.json per sample plus manifest.json. Output is a pure function
// of the config: two runs produce byte-identical trees regardless of the
// job count. Sample order is haze block, then rain, then snow; input pairs
// round-robin. Partial outputs of a failed sample are removed.
DatasetSummary generate_dataset(const DatasetConfig& config, int jobs = 0);

// Parameter record serialization shared by meta sidecars and the manifest.
std::string params_to_json_string(const WeatherParams& params, int indent = 2);
WeatherParams params_from_json_string(const std::string& text);
WeatherParams params_from_json_file(const std::filesystem::path& path);

}  // namespace weatherforge::synth
