#include "weatherforge/restore.hpp"

#include <algorithm>

#include "weatherforge/errors.hpp"

namespace weatherforge::restore {

Image restore_with_oracle(const Image& degraded, const OraclePriors& priors,
                          float t_floor, float alpha_ceiling) {
  require_same_shape(degraded, priors.transmission.map,
                     "degraded image / transmission");
  require_same_shape(degraded, priors.alpha, "degraded image / alpha");
  const Image background = occlusion::occlusion_invert(
      degraded, {priors.alpha, priors.occlusion_brightness}, alpha_ceiling);
  return scatter::scattering_invert(background, priors.transmission,
                                    priors.atmospheric_light, t_floor);
}

EstimatedRestoration restore_with_estimated(const Image& degraded,
                                            const EstimateConfig& config) {
  EstimatedRestoration result;

  const occlusion::OcclusionField occ =
      priors::estimate_occlusion(degraded, config.occlusion);
  result.alpha = occ.alpha;
  result.occlusion_brightness = occ.brightness;
  const Image background =
      occlusion::occlusion_invert(degraded, occ, config.alpha_ceiling);

  const ScalarMap dc = priors::dark_channel(background, config.patch);
  // Floor the estimate so an all-black input yields t = 1 and J = B = 0
  // instead of a divide-by-zero in the dark-channel scaling.
  result.atmospheric_light = std::max(
      priors::estimate_atmospheric_light(background, dc, config.top_frac),
      1e-3f);
  result.transmission = priors::estimate_transmission(
      background, result.atmospheric_light, config.omega, config.patch,
      config.t_floor);

  result.restored =
      scatter::scattering_invert(background, result.transmission,
                                 result.atmospheric_light, config.t_floor);
  return result;
}

}  // namespace weatherforge::restore
