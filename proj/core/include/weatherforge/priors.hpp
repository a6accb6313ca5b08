#pragma once

#include "weatherforge/image.hpp"
#include "weatherforge/occlusion.hpp"
#include "weatherforge/scatter.hpp"

namespace weatherforge::priors {

// Classical estimators for the weather priors (t, A, alpha, O) from a single
// degraded image. These are deliberately simple, deterministic baselines for
// the closed-form inversion path; none of them involve learning.

inline constexpr int kDefaultPatch = 15;
inline constexpr double kDefaultOmega = 0.95;
inline constexpr double kDefaultTopFraction = 0.001;

// Minimum over channels and a patch x patch window centered on each pixel;
// windows are clamped at the borders. patch must be odd and >= 1.
ScalarMap dark_channel(const Image& img, int patch = kDefaultPatch);

// Mean gray intensity over the top_frac brightest dark-channel pixels
// (at least one pixel; ties broken by pixel index). 0 < top_frac <= 1.
float estimate_atmospheric_light(const Image& img, const ScalarMap& dc,
                                 double top_frac = kDefaultTopFraction);

// t_hat = clamp(1 - omega * dark_channel(img / A), t_floor, 1).
// Requires A > 0 and 0 < omega <= 1.
scatter::TransmissionMap estimate_transmission(
    const Image& img, float light, double omega = kDefaultOmega,
    int patch = kDefaultPatch,
    float t_floor = scatter::kDefaultTransmissionFloor);

struct OcclusionEstimateConfig {
  double bright_thresh = 0.08;  // local brightness excess that flags a pixel
  int size_max = 2000;          // largest component kept, pixels
  int background_radius = 7;    // box-blur radius for the local background
};

// Flags small bright structures: pixels whose gray value exceeds a local
// box-blurred background by bright_thresh, grouped into 8-connected
// components, keeping components of at most size_max pixels. O is the mean
// gray intensity of kept pixels (1.0 when nothing is detected) and
// alpha_hat = clamp(excess / (O - background), 0, 1) on kept pixels.
occlusion::OcclusionField estimate_occlusion(
    const Image& img, const OcclusionEstimateConfig& config = {});

}  // namespace weatherforge::priors
