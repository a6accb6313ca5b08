#include "weatherforge/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace weatherforge::scatter {

TransmissionMap transmission_from_depth(const ScalarMap& depth, float beta) {
  if (beta < 0.0f) {
    throw ConfigError("scattering coefficient must be >= 0, got " +
                      std::to_string(beta));
  }
  ScalarMap t(depth.width(), depth.height());
  const std::span<const float> d = depth.samples();
  const std::span<float> out = t.samples();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 0.0f) {
      throw DomainError("negative depth " + std::to_string(d[i]) +
                        " at pixel " + std::to_string(i));
    }
    out[i] = std::exp(-beta * d[i]);
  }
  return TransmissionMap{std::move(t)};
}

Image scattering_composite(const Image& scene, const TransmissionMap& t,
                           float light) {
  require_same_shape(scene, t.map, "scattering_composite");
  if (light < 0.0f || light > 1.0f) {
    throw ConfigError("atmospheric light must be in [0,1], got " +
                      std::to_string(light));
  }
  Image out(scene.width(), scene.height());
  const std::span<const float> j = scene.samples();
  const std::span<const float> tm = t.map.samples();
  const std::span<float> b = out.samples();
  for (std::size_t i = 0; i < tm.size(); ++i) {
    const float ti = tm[i];
    const float air = light * (1.0f - ti);
    b[i * 3 + 0] = j[i * 3 + 0] * ti + air;
    b[i * 3 + 1] = j[i * 3 + 1] * ti + air;
    b[i * 3 + 2] = j[i * 3 + 2] * ti + air;
  }
  return out;
}

Image scattering_invert(const Image& background, const TransmissionMap& t,
                        float light, float t_floor) {
  require_same_shape(background, t.map, "scattering_invert");
  if (!(t_floor > 0.0f && t_floor <= 1.0f)) {
    throw ConfigError("transmission floor must be in (0,1], got " +
                      std::to_string(t_floor));
  }
  Image out(background.width(), background.height());
  const std::span<const float> b = background.samples();
  const std::span<const float> tm = t.map.samples();
  const std::span<float> j = out.samples();
  for (std::size_t i = 0; i < tm.size(); ++i) {
    const float ti = std::max(tm[i], t_floor);
    const float air = light * (1.0f - ti);
    for (int c = 0; c < 3; ++c) {
      j[i * 3 + c] = std::clamp((b[i * 3 + c] - air) / ti, 0.0f, 1.0f);
    }
  }
  return out;
}

}  // namespace weatherforge::scatter
