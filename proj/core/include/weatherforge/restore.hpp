#pragma once

#include "weatherforge/image.hpp"
#include "weatherforge/occlusion.hpp"
#include "weatherforge/priors.hpp"
#include "weatherforge/scatter.hpp"

namespace weatherforge::restore {

// The two-step closed-form inversion: peel the particle layer, then the
// scattering layer. "Oracle" means the priors stored at synthesis time;
// "estimated" recovers them from the degraded image alone.

struct OraclePriors {
  scatter::TransmissionMap transmission;
  ScalarMap alpha;
  float occlusion_brightness = 1.0f;  // O
  float atmospheric_light = 1.0f;     // A
};

// B_hat = occlusion inversion of I, J_hat = scattering inversion of B_hat.
// With alpha = 0 this reduces exactly to the scattering inversion; with
// t = 1 exactly to the occlusion inversion. Output clamped to [0, 1].
Image restore_with_oracle(
    const Image& degraded, const OraclePriors& priors,
    float t_floor = scatter::kDefaultTransmissionFloor,
    float alpha_ceiling = occlusion::kDefaultAlphaCeiling);

struct EstimateConfig {
  int patch = priors::kDefaultPatch;
  double omega = priors::kDefaultOmega;
  double top_frac = priors::kDefaultTopFraction;
  priors::OcclusionEstimateConfig occlusion;
  float t_floor = scatter::kDefaultTransmissionFloor;
  float alpha_ceiling = occlusion::kDefaultAlphaCeiling;
};

struct EstimatedRestoration {
  Image restored;
  scatter::TransmissionMap transmission;  // t_hat
  ScalarMap alpha;                        // alpha_hat
  float atmospheric_light = 1.0f;         // A_hat as used by the inversion
  float occlusion_brightness = 1.0f;      // O_hat
};

// Runs the classical estimators, then the same inversion chain. The
// estimated light is floored at a small positive value so degenerate inputs
// (e.g. an all-black image) pass through without numerical faults.
EstimatedRestoration restore_with_estimated(const Image& degraded,
                                            const EstimateConfig& config = {});

}  // namespace weatherforge::restore
