#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "weatherforge/image.hpp"

namespace weatherforge::occlusion {

// Per-pixel particle coverage plus the (near-constant) particle brightness.
struct OcclusionField {
  ScalarMap alpha;          // in [0, 1]
  float brightness = 0.9f;  // O in [0, 1]
};

// Camera/drop geometry for the visibility regimes. The near/far thresholds
// are z1 = 2*f*a and z2 = R*z1.
struct VisibilityParams {
  double focal_length = 0.05;  // f, meters
  double drop_radius = 0.001;  // a, meters
  double ratio = 100.0;        // R, unitless > 1

  double z1() const { return 2.0 * focal_length * drop_radius; }
  double z2() const { return ratio * z1(); }
};

enum class Regime {
  CameraLimited,      // z < z1: visibility set by exposure, not distance
  InverseDepthDecay,  // z1 <= z < z2: visibility falls off as 1/z
  AggregateScattering  // z >= z2: particles too small, fog-like scattering
};

std::string to_string(Regime r);

// Classifies a particle distance z (meters). Throws ConfigError for invalid
// params (f, a <= 0 or R <= 1), DomainError for z < 0.
Regime visibility_regime(double z, const VisibilityParams& p);

enum class ParticleKind { Rain, Snow };

// One procedural particle layer. Generation is a pure function of
// (shape, spec): the per-layer seed fully determines the draws.
//
// Draw order contract (SplitMix64 stream seeded with `seed`):
//   rain, per streak: center_x, center_y
//   snow, per flake:  center_x, center_y, radius, eccentricity, orientation
// Particle count = llround(density * width * height / 1e6).
struct LayerSpec {
  ParticleKind kind = ParticleKind::Rain;
  double density = 200.0;      // particles per megapixel, >= 0
  double angle_deg = 0.0;      // rain: streak angle, degrees from vertical
  double length = 12.0;        // rain: streak length, pixels
  double width = 1.5;          // rain: streak width, pixels (length >= width >= 1)
  double radius_min = 1.0;     // snow: flake radius range, pixels
  double radius_max = 3.0;
  double blur_sigma = 0.0;     // gaussian blur applied to the finished layer
  double peak_alpha = 0.5;     // in [0, 1]
  std::uint64_t seed = 0;
};

// Renders anti-aliased streak segments at spec.angle_deg, then blurs by
// blur_sigma. Values lie in [0, peak_alpha].
ScalarMap generate_rain_layer(int width, int height, const LayerSpec& spec);

// Renders gaussian-falloff ellipses with radii in [radius_min, radius_max]
// and eccentricity drawn from [0.6, 1.0]. Values lie in [0, peak_alpha].
ScalarMap generate_snow_layer(int width, int height, const LayerSpec& spec);

// Dispatches on spec.kind.
ScalarMap generate_layer(int width, int height, const LayerSpec& spec);

// The multi-layer particle volume: near layers cover the camera-limited
// region at full strength; the far stack is weighted by (1 - e^(-beta*d)) so
// deeper pixels accumulate more particle coverage.
struct VolumetricConfig {
  std::vector<LayerSpec> near_layers;
  std::vector<LayerSpec> far_layers;
  float beta = 0.01f;  // 1/meter, shared with the scattering transmission

  bool empty() const { return near_layers.empty() && far_layers.empty(); }
};

// alpha(x) = clamp(sum_near(x) + (1 - e^(-beta*d(x))) * sum_far(x), 0, 1).
// Layers are generated at the depth map's shape.
ScalarMap volumetric_alpha(const VolumetricConfig& cfg, const ScalarMap& depth);

// I(x) = O * alpha(x) + B(x) * (1 - alpha(x)). Convex, so output in [0, 1].
Image occlusion_composite(const Image& background, const OcclusionField& occ);

inline constexpr float kDefaultAlphaCeiling = 0.95f;

// B(x) = (I(x) - O * a') / (1 - a') with a' = min(alpha(x), alpha_ceiling),
// clamped to [0, 1]. alpha_ceiling must be in [0, 1); it bounds the
// 1/(1-alpha) amplification.
Image occlusion_invert(const Image& observed, const OcclusionField& occ,
                       float alpha_ceiling = kDefaultAlphaCeiling);

// Gaussian blur with a 3-sigma kernel and replicated edges; sigma <= 0 is a
// no-op copy. Exposed because layer generation and the occlusion estimator
// both use it.
ScalarMap gaussian_blur(const ScalarMap& map, double sigma);

}  // namespace weatherforge::occlusion
