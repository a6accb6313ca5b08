#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "attn_check.hpp"
#include "weatherforge/errors.hpp"
#include "weatherforge/image_io.hpp"
#include "weatherforge/metrics.hpp"
#include "weatherforge/occlusion.hpp"
#include "weatherforge/parallel.hpp"
#include "weatherforge/restore.hpp"
#include "weatherforge/synth.hpp"

namespace fs = std::filesystem;
using namespace weatherforge;

namespace {

// --- logging ---------------------------------------------------------------

enum LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

int log_threshold() {
  static const int threshold = [] {
    const char* env = std::getenv("WEATHERFORGE_LOG");
    if (!env) return static_cast<int>(kWarn);
    const std::string s = env;
    if (s == "error" || s == "0") return static_cast<int>(kError);
    if (s == "warn" || s == "1") return static_cast<int>(kWarn);
    if (s == "info" || s == "2") return static_cast<int>(kInfo);
    if (s == "debug" || s == "3") return static_cast<int>(kDebug);
    std::cerr << "[warn] unknown WEATHERFORGE_LOG level '" << s
              << "', using warn\n";
    return static_cast<int>(kWarn);
  }();
  return threshold;
}

void log_at(LogLevel level, const char* tag, const std::string& msg) {
  if (level <= log_threshold()) std::cerr << '[' << tag << "] " << msg << '\n';
}
void log_info(const std::string& msg) { log_at(kInfo, "info", msg); }
void log_debug(const std::string& msg) { log_at(kDebug, "debug", msg); }

// --- synth -----------------------------------------------------------------

struct SynthOpts {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int jobs = 0;
};

int run_synth(const SynthOpts& opts) {
  synth::DatasetConfig cfg = synth::load_dataset_config(opts.config);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;

  const auto start = std::chrono::steady_clock::now();
  const synth::DatasetSummary summary = synth::generate_dataset(cfg, opts.jobs);
  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  log_info("synthesized " + std::to_string(summary.sample_count) +
           " samples in " + std::to_string(elapsed) + " s");
  std::cout << summary.sample_count << " samples -> " << cfg.out_dir << '\n';
  return 0;
}

// --- degrade ---------------------------------------------------------------

struct DegradeOpts {
  std::string input, depth, out;
  std::string weather = "haze";
  std::uint64_t seed = 0;
  std::optional<double> beta, light, brightness, gamma;
  int bit_depth = 8;
  std::string save_meta, save_t, save_alpha, save_gt;
};

void write_by_extension(const Image& img, const fs::path& path,
                        int bit_depth) {
  if (path.extension() == ".pfm")
    write_image_pfm(img, path);
  else
    write_image(img, path, bit_depth);
}

int run_degrade(const DegradeOpts& opts) {
  const synth::WeatherType type = synth::weather_type_from_string(opts.weather);
  synth::WeatherParams params = synth::sample_weather_params(
      opts.seed, 0, synth::base_class(type));
  params.type = type;  // explicit type wins over the sampled scatter coin
  if (opts.beta) {
    params.atmosphere.beta = static_cast<float>(*opts.beta);
    params.volumetric.beta = static_cast<float>(*opts.beta);
  }
  if (opts.light) params.atmosphere.light = static_cast<float>(*opts.light);
  if (opts.brightness)
    params.occlusion_brightness = static_cast<float>(*opts.brightness);
  if (opts.gamma) params.lowlight_gamma = static_cast<float>(*opts.gamma);

  const Image clean = read_image(opts.input);
  const ScalarMap depth = read_scalar_map(opts.depth);
  const synth::DegradedSample sample =
      synth::synthesize_sample(clean, depth, params);

  write_by_extension(sample.degraded, opts.out, opts.bit_depth);
  if (!opts.save_gt.empty())
    write_by_extension(sample.clean, opts.save_gt, opts.bit_depth);
  if (!opts.save_t.empty())
    write_scalar_map(sample.transmission.map, opts.save_t);
  if (!opts.save_alpha.empty()) write_scalar_map(sample.alpha, opts.save_alpha);
  if (!opts.save_meta.empty()) {
    std::ofstream out(opts.save_meta, std::ios::binary);
    if (!out) throw IoError("cannot write " + opts.save_meta);
    out << synth::params_to_json_string(params) << '\n';
  }
  log_info("degraded " + opts.input + " as " + synth::to_string(params.type));
  return 0;
}

// --- restore ---------------------------------------------------------------

struct RestoreOpts {
  std::string input, out;
  bool oracle = false;
  bool estimate = false;
  std::string meta, t_path, alpha_path;
  bool invert_gamma = false;
  std::optional<double> gamma;
  double t_floor = scatter::kDefaultTransmissionFloor;
  double alpha_ceiling = occlusion::kDefaultAlphaCeiling;
  int patch = priors::kDefaultPatch;
  double omega = priors::kDefaultOmega;
  double top_frac = priors::kDefaultTopFraction;
  double bright_thresh = priors::OcclusionEstimateConfig{}.bright_thresh;
  int size_max = priors::OcclusionEstimateConfig{}.size_max;
  int background_radius = priors::OcclusionEstimateConfig{}.background_radius;
  int bit_depth = 8;
  std::string save_t, save_alpha;
};

int run_restore(const RestoreOpts& opts) {
  const Image degraded = read_image(opts.input);
  Image restored;
  float recorded_gamma = 1.0f;

  if (opts.oracle) {
    if (opts.meta.empty() || opts.t_path.empty() || opts.alpha_path.empty()) {
      std::cerr << "restore --oracle requires --meta, --t and --alpha\n";
      return 2;
    }
    const synth::WeatherParams params =
        synth::params_from_json_file(opts.meta);
    recorded_gamma = params.lowlight_gamma;
    restore::OraclePriors priors;
    priors.transmission.map = read_scalar_map(opts.t_path);
    priors.alpha = read_scalar_map(opts.alpha_path);
    priors.occlusion_brightness = params.occlusion_brightness;
    priors.atmospheric_light = params.atmosphere.light;
    restored = restore::restore_with_oracle(
        degraded, priors, static_cast<float>(opts.t_floor),
        static_cast<float>(opts.alpha_ceiling));
  } else {
    restore::EstimateConfig cfg;
    cfg.patch = opts.patch;
    cfg.omega = opts.omega;
    cfg.top_frac = opts.top_frac;
    cfg.occlusion.bright_thresh = opts.bright_thresh;
    cfg.occlusion.size_max = opts.size_max;
    cfg.occlusion.background_radius = opts.background_radius;
    cfg.t_floor = static_cast<float>(opts.t_floor);
    cfg.alpha_ceiling = static_cast<float>(opts.alpha_ceiling);
    restore::EstimatedRestoration result =
        restore::restore_with_estimated(degraded, cfg);
    restored = std::move(result.restored);
    if (!opts.save_t.empty())
      write_scalar_map(result.transmission.map, opts.save_t);
    if (!opts.save_alpha.empty())
      write_scalar_map(result.alpha, opts.save_alpha);
    std::printf("estimated: light=%.6f brightness=%.6f\n",
                static_cast<double>(result.atmospheric_light),
                static_cast<double>(result.occlusion_brightness));
  }

  if (opts.invert_gamma) {
    float gamma = recorded_gamma;
    if (opts.gamma) gamma = static_cast<float>(*opts.gamma);
    if (opts.estimate && !opts.gamma) {
      std::cerr << "restore --estimate --invert-gamma needs --gamma\n";
      return 2;
    }
    restored = synth::invert_low_light(restored, gamma);
  }
  write_by_extension(restored, opts.out, opts.bit_depth);
  log_info("restored " + opts.input + " -> " + opts.out);
  return 0;
}

// --- eval ------------------------------------------------------------------

struct EvalOpts {
  std::string pred, ref;
  std::string metric = "all";
  std::string mode = "rgb";
  int jobs = 0;
};

bool image_file(const fs::path& p) {
  return p.extension() == ".png" || p.extension() == ".pfm";
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int run_eval(const EvalOpts& opts) {
  const metrics::ChannelMode mode =
      metrics::channel_mode_from_string(opts.mode);
  const bool want_psnr = opts.metric == "psnr" || opts.metric == "all";
  const bool want_ssim = opts.metric == "ssim" || opts.metric == "all";
  if (!want_psnr && !want_ssim)
    throw ConfigError("unknown metric '" + opts.metric +
                      "' (expected psnr, ssim or all)");

  if (!fs::is_directory(opts.pred))
    throw IoError("prediction directory not found: " + opts.pred);
  if (!fs::is_directory(opts.ref))
    throw IoError("reference directory not found: " + opts.ref);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(opts.pred))
    if (entry.is_regular_file() && image_file(entry.path()))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw IoError("no images found in " + opts.pred);

  struct Row {
    std::string name;
    double psnr = 0.0;
    double ssim = 0.0;
  };
  std::vector<Row> rows(files.size());
  parallel_for(files.size(), opts.jobs, [&](std::size_t i) {
    const fs::path& pred_path = files[i];
    const fs::path ref_path = fs::path(opts.ref) / pred_path.filename();
    if (!fs::exists(ref_path))
      throw IoError("no reference image for " +
                    pred_path.filename().string());
    const Image pred = read_image(pred_path);
    const Image ref = read_image(ref_path);
    rows[i].name = pred_path.stem().string();
    if (want_psnr) rows[i].psnr = metrics::psnr(pred, ref, mode);
    if (want_ssim) rows[i].ssim = metrics::ssim(pred, ref, mode);
  });

  std::printf("name,metric,value\n");
  double psnr_sum = 0.0, ssim_sum = 0.0;
  for (const Row& row : rows) {
    if (want_psnr) {
      std::printf("%s,psnr,%s\n", row.name.c_str(),
                  format_value(row.psnr).c_str());
      psnr_sum += row.psnr;
    }
    if (want_ssim) {
      std::printf("%s,ssim,%s\n", row.name.c_str(),
                  format_value(row.ssim).c_str());
      ssim_sum += row.ssim;
    }
  }
  const double n = static_cast<double>(rows.size());
  if (want_psnr)
    std::printf("mean,psnr,%s\n", format_value(psnr_sum / n).c_str());
  if (want_ssim)
    std::printf("mean,ssim,%s\n", format_value(ssim_sum / n).c_str());
  return 0;
}

// --- attn-check ------------------------------------------------------------

int run_attn_check(std::uint64_t seed) {
  const auto results = cli::run_attention_checks(seed);
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  bool all_pass = true;
  for (const auto& r : results) {
    std::printf("%-*s  max_err=%.3e  tol=%.0e  %s\n",
                static_cast<int>(width), r.name.c_str(), r.max_err,
                r.tolerance, r.pass ? "PASS" : "FAIL");
    all_pass = all_pass && r.pass;
  }
  std::printf("%zu/%zu checks passed\n",
              static_cast<std::size_t>(
                  std::count_if(results.begin(), results.end(),
                                [](const auto& r) { return r.pass; })),
              results.size());
  return all_pass ? 0 : 1;
}

// --- visibility ------------------------------------------------------------

struct VisibilityOpts {
  double focal_length = occlusion::VisibilityParams{}.focal_length;
  double drop_radius = occlusion::VisibilityParams{}.drop_radius;
  double ratio = occlusion::VisibilityParams{}.ratio;
  std::vector<double> z;
};

int run_visibility(const VisibilityOpts& opts) {
  occlusion::VisibilityParams params;
  params.focal_length = opts.focal_length;
  params.drop_radius = opts.drop_radius;
  params.ratio = opts.ratio;
  log_info("z1=" + std::to_string(params.z1()) +
           " z2=" + std::to_string(params.z2()));
  std::printf("z,regime\n");
  for (double z : opts.z) {
    const occlusion::Regime regime = occlusion::visibility_regime(z, params);
    std::printf("%g,%s\n", z, occlusion::to_string(regime).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "weatherforge: physics-based synthesis, restoration and analysis of "
      "adverse-weather images"};
  app.require_subcommand(1);

  SynthOpts synth_opts;
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate a degraded-image dataset from a JSON config");
  synth_cmd->add_option("--config", synth_opts.config, "Dataset config JSON")
      ->required();
  synth_cmd->add_option("--seed", synth_opts.seed,
                        "Override the config master seed");
  synth_cmd->add_option("--out-dir", synth_opts.out_dir,
                        "Override the config output directory");
  synth_cmd->add_option("--jobs", synth_opts.jobs,
                        "Worker count (0 = all cores)");

  DegradeOpts degrade_opts;
  auto* degrade_cmd = app.add_subcommand(
      "degrade", "Degrade a single image with explicit weather parameters");
  degrade_cmd->add_option("--input", degrade_opts.input, "Clean image")
      ->required();
  degrade_cmd->add_option("--depth", degrade_opts.depth, "Depth map (PFM)")
      ->required();
  degrade_cmd->add_option("--out", degrade_opts.out, "Degraded output")
      ->required();
  degrade_cmd->add_option(
      "--weather", degrade_opts.weather,
      "haze | rain | rain_haze | snow | snow_haze");
  degrade_cmd->add_option("--seed", degrade_opts.seed,
                          "Seed for the sampled parameters");
  degrade_cmd->add_option("--beta", degrade_opts.beta,
                          "Scattering coefficient override");
  degrade_cmd->add_option("--light", degrade_opts.light,
                          "Atmospheric light override");
  degrade_cmd->add_option("--brightness", degrade_opts.brightness,
                          "Particle brightness override");
  degrade_cmd->add_option("--gamma", degrade_opts.gamma,
                          "Low-light gamma override");
  degrade_cmd->add_option("--bit-depth", degrade_opts.bit_depth,
                          "PNG bit depth (8 or 16)");
  degrade_cmd->add_option("--save-meta", degrade_opts.save_meta,
                          "Write the parameter record here");
  degrade_cmd->add_option("--save-t", degrade_opts.save_t,
                          "Write the transmission map here");
  degrade_cmd->add_option("--save-alpha", degrade_opts.save_alpha,
                          "Write the coverage map here");
  degrade_cmd->add_option("--save-gt", degrade_opts.save_gt,
                          "Write the pre-weather scene here");

  RestoreOpts restore_opts;
  auto* restore_cmd =
      app.add_subcommand("restore", "Invert the degradation model");
  restore_cmd->add_option("--input", restore_opts.input, "Degraded image")
      ->required();
  restore_cmd->add_option("--out", restore_opts.out, "Restored output")
      ->required();
  auto* mode_group = restore_cmd->add_option_group("mode");
  mode_group->add_flag("--oracle", restore_opts.oracle,
                       "Use the priors stored at synthesis time");
  mode_group->add_flag("--estimate", restore_opts.estimate,
                       "Estimate the priors from the image");
  mode_group->require_option(1);
  restore_cmd->add_option("--meta", restore_opts.meta,
                          "Parameter record (oracle)");
  restore_cmd->add_option("--t", restore_opts.t_path,
                          "Transmission map (oracle)");
  restore_cmd->add_option("--alpha", restore_opts.alpha_path,
                          "Coverage map (oracle)");
  restore_cmd->add_flag("--invert-gamma", restore_opts.invert_gamma,
                        "Also undo the recorded low-light gamma");
  restore_cmd->add_option("--gamma", restore_opts.gamma,
                          "Gamma for --invert-gamma (overrides the record)");
  restore_cmd->add_option("--t-floor", restore_opts.t_floor,
                          "Transmission divisor floor");
  restore_cmd->add_option("--alpha-ceiling", restore_opts.alpha_ceiling,
                          "Coverage divisor ceiling");
  restore_cmd->add_option("--patch", restore_opts.patch,
                          "Dark-channel patch size (estimate)");
  restore_cmd->add_option("--omega", restore_opts.omega,
                          "Haze retention factor (estimate)");
  restore_cmd->add_option("--top-frac", restore_opts.top_frac,
                          "Brightest fraction for the light estimate");
  restore_cmd->add_option("--bright-thresh", restore_opts.bright_thresh,
                          "Particle detection threshold (estimate)");
  restore_cmd->add_option("--size-max", restore_opts.size_max,
                          "Largest detected component (estimate)");
  restore_cmd->add_option("--background-radius",
                          restore_opts.background_radius,
                          "Local background blur radius (estimate)");
  restore_cmd->add_option("--bit-depth", restore_opts.bit_depth,
                          "PNG bit depth (8 or 16)");
  restore_cmd->add_option("--save-t", restore_opts.save_t,
                          "Write the estimated transmission here");
  restore_cmd->add_option("--save-alpha", restore_opts.save_alpha,
                          "Write the estimated coverage here");

  EvalOpts eval_opts;
  auto* eval_cmd = app.add_subcommand(
      "eval", "Compare two image directories, CSV on stdout");
  eval_cmd->add_option("--pred", eval_opts.pred, "Prediction directory")
      ->required();
  eval_cmd->add_option("--ref", eval_opts.ref, "Reference directory")
      ->required();
  eval_cmd->add_option("--metric", eval_opts.metric, "psnr | ssim | all");
  eval_cmd->add_option("--mode", eval_opts.mode, "rgb | y");
  eval_cmd->add_option("--jobs", eval_opts.jobs,
                       "Worker count (0 = all cores)");

  std::uint64_t attn_seed = 7;
  auto* attn_cmd = app.add_subcommand(
      "attn-check", "Run the attention invariance suite");
  attn_cmd->add_option("--seed", attn_seed, "Fixture seed");

  VisibilityOpts vis_opts;
  auto* vis_cmd = app.add_subcommand(
      "visibility", "Classify depths into imaging regimes");
  vis_cmd->add_option("--focal-length", vis_opts.focal_length,
                      "Focal length, meters");
  vis_cmd->add_option("--drop-radius", vis_opts.drop_radius,
                      "Particle radius, meters");
  vis_cmd->add_option("--ratio", vis_opts.ratio,
                      "Far-boundary multiple of the near boundary");
  vis_cmd->add_option("--z", vis_opts.z, "Depths to classify, meters")
      ->required()
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // every parse failure is a usage error
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth_opts);
    if (degrade_cmd->parsed()) return run_degrade(degrade_opts);
    if (restore_cmd->parsed()) return run_restore(restore_opts);
    if (eval_cmd->parsed()) return run_eval(eval_opts);
    if (attn_cmd->parsed()) return run_attn_check(attn_seed);
    if (vis_cmd->parsed()) return run_visibility(vis_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
