#include "weatherforge/occlusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weatherforge/rng.hpp"

namespace weatherforge::occlusion {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::CameraLimited: return "camera-limited";
    case Regime::InverseDepthDecay: return "inverse-depth-decay";
    case Regime::AggregateScattering: return "aggregate-scattering";
  }
  return "?";
}

Regime visibility_regime(double z, const VisibilityParams& p) {
  if (p.focal_length <= 0.0 || p.drop_radius <= 0.0) {
    throw ConfigError("focal length and drop radius must be positive");
  }
  if (p.ratio <= 1.0) {
    throw ConfigError("visibility ratio must be > 1, got " +
                      std::to_string(p.ratio));
  }
  if (z < 0.0) {
    throw DomainError("particle distance must be >= 0, got " +
                      std::to_string(z));
  }
  if (z < p.z1()) return Regime::CameraLimited;
  if (z < p.z2()) return Regime::InverseDepthDecay;
  return Regime::AggregateScattering;
}

namespace {

std::size_t particle_count(int width, int height, double density) {
  const double expected =
      density * static_cast<double>(width) * height / 1e6;
  return static_cast<std::size_t>(std::llround(expected));
}

void check_common(const LayerSpec& spec) {
  if (spec.density < 0.0) {
    throw ConfigError("layer density must be >= 0, got " +
                      std::to_string(spec.density));
  }
  if (spec.peak_alpha < 0.0 || spec.peak_alpha > 1.0) {
    throw ConfigError("peak alpha must be in [0,1], got " +
                      std::to_string(spec.peak_alpha));
  }
}

double point_segment_distance(double px, double py, double ax, double ay,
                              double bx, double by) {
  const double vx = bx - ax, vy = by - ay;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((px - ax) * vx + (py - ay) * vy) / len2, 0.0, 1.0);
  }
  const double dx = px - (ax + t * vx);
  const double dy = py - (ay + t * vy);
  return std::hypot(dx, dy);
}

}  // namespace

ScalarMap gaussian_blur(const ScalarMap& map, double sigma) {
  if (sigma <= 0.0) return map;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<float> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    kernel[i + radius] = static_cast<float>(v);
    sum += v;
  }
  for (float& k : kernel) k = static_cast<float>(k / sum);

  const int w = map.width(), h = map.height();
  ScalarMap tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float acc = 0.0f;
      for (int i = -radius; i <= radius; ++i) {
        const int xi = std::clamp(x + i, 0, w - 1);
        acc += map(xi, y) * kernel[i + radius];
      }
      tmp(x, y) = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float acc = 0.0f;
      for (int i = -radius; i <= radius; ++i) {
        const int yi = std::clamp(y + i, 0, h - 1);
        acc += tmp(x, yi) * kernel[i + radius];
      }
      out(x, y) = acc;
    }
  }
  return out;
}

ScalarMap generate_rain_layer(int width, int height, const LayerSpec& spec) {
  if (spec.kind != ParticleKind::Rain) {
    throw ConfigError("generate_rain_layer called with a non-rain spec");
  }
  check_common(spec);
  if (!(spec.length >= spec.width && spec.width >= 1.0)) {
    throw ConfigError("rain spec needs length >= width >= 1 (got length " +
                      std::to_string(spec.length) + ", width " +
                      std::to_string(spec.width) + ")");
  }
  ScalarMap layer(width, height);  // throws ShapeError on zero-size
  const std::size_t count = particle_count(width, height, spec.density);
  if (count == 0 || spec.peak_alpha == 0.0) return layer;

  SplitMix64 rng(spec.seed);
  const double theta = spec.angle_deg * std::numbers::pi / 180.0;
  // Degrees from vertical, y axis pointing down: a zero-angle streak falls
  // straight down the image.
  const double dx = std::sin(theta), dy = std::cos(theta);
  const double half_len = spec.length / 2.0;
  const double half_w = spec.width / 2.0;
  const float peak = static_cast<float>(spec.peak_alpha);

  for (std::size_t s = 0; s < count; ++s) {
    const double cx = rng.uniform(0.0, width);
    const double cy = rng.uniform(0.0, height);
    const double ax = cx - dx * half_len, ay = cy - dy * half_len;
    const double bx = cx + dx * half_len, by = cy + dy * half_len;
    const double margin = half_w + 0.5;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - margin)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(std::max(ax, bx) + margin)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - margin)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(std::max(ay, by) + margin)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double d = point_segment_distance(x + 0.5, y + 0.5, ax, ay, bx, by);
        const double cov = std::clamp(half_w + 0.5 - d, 0.0, 1.0);
        if (cov > 0.0) {
          layer(x, y) = std::max(layer(x, y), peak * static_cast<float>(cov));
        }
      }
    }
  }
  return gaussian_blur(layer, spec.blur_sigma);
}

ScalarMap generate_snow_layer(int width, int height, const LayerSpec& spec) {
  if (spec.kind != ParticleKind::Snow) {
    throw ConfigError("generate_snow_layer called with a non-snow spec");
  }
  check_common(spec);
  if (spec.radius_min > spec.radius_max || spec.radius_min <= 0.0) {
    throw ConfigError("snow radius range inverted or non-positive: [" +
                      std::to_string(spec.radius_min) + ", " +
                      std::to_string(spec.radius_max) + "]");
  }
  ScalarMap layer(width, height);
  const std::size_t count = particle_count(width, height, spec.density);
  if (count == 0 || spec.peak_alpha == 0.0) return layer;

  SplitMix64 rng(spec.seed);
  const float peak = static_cast<float>(spec.peak_alpha);
  constexpr double kCutoffQ = 9.0;  // 3 sigma

  for (std::size_t s = 0; s < count; ++s) {
    const double cx = rng.uniform(0.0, width);
    const double cy = rng.uniform(0.0, height);
    const double radius = rng.uniform(spec.radius_min, spec.radius_max);
    const double ecc = rng.uniform(0.6, 1.0);
    const double phi = rng.uniform(0.0, std::numbers::pi);
    const double su = radius / 2.0;        // major sigma
    const double sv = radius * ecc / 2.0;  // minor sigma
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    const double extent = 3.0 * su + 0.5;
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - extent)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(cx + extent)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - extent)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(cy + extent)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double rx = (x + 0.5) - cx, ry = (y + 0.5) - cy;
        const double u = rx * cphi + ry * sphi;
        const double v = -rx * sphi + ry * cphi;
        const double q = (u * u) / (su * su) + (v * v) / (sv * sv);
        if (q <= kCutoffQ) {
          const float val = peak * static_cast<float>(std::exp(-0.5 * q));
          layer(x, y) = std::max(layer(x, y), val);
        }
      }
    }
  }
  return gaussian_blur(layer, spec.blur_sigma);
}

ScalarMap generate_layer(int width, int height, const LayerSpec& spec) {
  return spec.kind == ParticleKind::Rain
             ? generate_rain_layer(width, height, spec)
             : generate_snow_layer(width, height, spec);
}

ScalarMap volumetric_alpha(const VolumetricConfig& cfg,
                           const ScalarMap& depth) {
  if (cfg.beta < 0.0f) {
    throw ConfigError("volumetric beta must be >= 0, got " +
                      std::to_string(cfg.beta));
  }
  const int w = depth.width(), h = depth.height();
  ScalarMap near_sum(w, h);
  for (const LayerSpec& spec : cfg.near_layers) {
    const ScalarMap layer = generate_layer(w, h, spec);
    for (std::size_t i = 0; i < near_sum.size(); ++i) near_sum[i] += layer[i];
  }
  ScalarMap far_sum(w, h);
  for (const LayerSpec& spec : cfg.far_layers) {
    const ScalarMap layer = generate_layer(w, h, spec);
    for (std::size_t i = 0; i < far_sum.size(); ++i) far_sum[i] += layer[i];
  }

  ScalarMap alpha(w, h);
  const std::span<const float> d = depth.samples();
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (d[i] < 0.0f) {
      throw DomainError("negative depth " + std::to_string(d[i]) +
                        " at pixel " + std::to_string(i));
    }
    const float far_weight = 1.0f - std::exp(-cfg.beta * d[i]);
    alpha[i] = std::clamp(near_sum[i] + far_weight * far_sum[i], 0.0f, 1.0f);
  }
  return alpha;
}

Image occlusion_composite(const Image& background, const OcclusionField& occ) {
  require_same_shape(background, occ.alpha, "occlusion_composite");
  if (occ.brightness < 0.0f || occ.brightness > 1.0f) {
    throw ConfigError("occlusion brightness must be in [0,1], got " +
                      std::to_string(occ.brightness));
  }
  Image out(background.width(), background.height());
  const std::span<const float> b = background.samples();
  const std::span<const float> a = occ.alpha.samples();
  const std::span<float> dst = out.samples();
  const float bright = occ.brightness;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const float ai = a[i];
    const float cover = bright * ai;
    const float keep = 1.0f - ai;
    dst[i * 3 + 0] = cover + b[i * 3 + 0] * keep;
    dst[i * 3 + 1] = cover + b[i * 3 + 1] * keep;
    dst[i * 3 + 2] = cover + b[i * 3 + 2] * keep;
  }
  return out;
}

Image occlusion_invert(const Image& observed, const OcclusionField& occ,
                       float alpha_ceiling) {
  require_same_shape(observed, occ.alpha, "occlusion_invert");
  if (!(alpha_ceiling >= 0.0f && alpha_ceiling < 1.0f)) {
    throw ConfigError("alpha ceiling must be in [0,1), got " +
                      std::to_string(alpha_ceiling));
  }
  Image out(observed.width(), observed.height());
  const std::span<const float> src = observed.samples();
  const std::span<const float> a = occ.alpha.samples();
  const std::span<float> dst = out.samples();
  const float bright = occ.brightness;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const float ai = std::min(a[i], alpha_ceiling);
    const float inv_keep = 1.0f / (1.0f - ai);
    const float cover = bright * ai;
    for (int c = 0; c < 3; ++c) {
      dst[i * 3 + c] =
          std::clamp((src[i * 3 + c] - cover) * inv_keep, 0.0f, 1.0f);
    }
  }
  return out;
}

}  // namespace weatherforge::occlusion
