#include "weatherforge/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "weatherforge/errors.hpp"

namespace weatherforge::priors {

namespace {

ScalarMap channel_min(const Image& img) {
  ScalarMap out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out(x, y) = std::min({img(x, y, 0), img(x, y, 1), img(x, y, 2)});
  return out;
}

// Separable min filter; min over a square window factors into per-axis mins.
ScalarMap min_filter(const ScalarMap& in, int radius) {
  const int w = in.width();
  const int h = in.height();
  ScalarMap rows(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float m = in(x, y);
      const int x0 = std::max(0, x - radius);
      const int x1 = std::min(w - 1, x + radius);
      for (int xx = x0; xx <= x1; ++xx) m = std::min(m, in(xx, y));
      rows(x, y) = m;
    }
  ScalarMap out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float m = rows(x, y);
      const int y0 = std::max(0, y - radius);
      const int y1 = std::min(h - 1, y + radius);
      for (int yy = y0; yy <= y1; ++yy) m = std::min(m, rows(x, yy));
      out(x, y) = m;
    }
  return out;
}

ScalarMap mean_gray(const Image& img) {
  ScalarMap out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out(x, y) =
          (img(x, y, 0) + img(x, y, 1) + img(x, y, 2)) * (1.0f / 3.0f);
  return out;
}

// Clamped-window box mean, separable with running sums.
ScalarMap box_mean(const ScalarMap& in, int radius) {
  const int w = in.width();
  const int h = in.height();
  ScalarMap rows(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - radius);
      const int x1 = std::min(w - 1, x + radius);
      double sum = 0.0;
      for (int xx = x0; xx <= x1; ++xx) sum += in(xx, y);
      rows(x, y) = static_cast<float>(sum / (x1 - x0 + 1));
    }
  ScalarMap out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int y0 = std::max(0, y - radius);
      const int y1 = std::min(h - 1, y + radius);
      double sum = 0.0;
      for (int yy = y0; yy <= y1; ++yy) sum += rows(x, yy);
      out(x, y) = static_cast<float>(sum / (y1 - y0 + 1));
    }
  return out;
}

}  // namespace

ScalarMap dark_channel(const Image& img, int patch) {
  if (patch < 1 || patch % 2 == 0)
    throw ConfigError("dark channel patch must be odd and >= 1, got " +
                      std::to_string(patch));
  if (img.empty()) throw ShapeError("dark channel of an empty image");
  return min_filter(channel_min(img), patch / 2);
}

float estimate_atmospheric_light(const Image& img, const ScalarMap& dc,
                                 double top_frac) {
  require_same_shape(img, dc, "image / dark channel");
  if (!(top_frac > 0.0 && top_frac <= 1.0))
    throw ConfigError("top_frac must be in (0, 1], got " +
                      std::to_string(top_frac));
  const std::size_t n = dc.size();
  if (n == 0) throw ShapeError("atmospheric light of an empty image");
  const std::size_t keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(top_frac * n + 0.5)));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (dc[a] != dc[b]) return dc[a] > dc[b];
                      return a < b;
                    });

  const int w = img.width();
  double sum = 0.0;
  for (std::size_t k = 0; k < keep; ++k) {
    const int x = static_cast<int>(order[k] % w);
    const int y = static_cast<int>(order[k] / w);
    sum += (img(x, y, 0) + img(x, y, 1) + img(x, y, 2)) / 3.0;
  }
  return static_cast<float>(sum / keep);
}

scatter::TransmissionMap estimate_transmission(const Image& img, float light,
                                               double omega, int patch,
                                               float t_floor) {
  if (!(light > 0.0f))
    throw ConfigError("atmospheric light must be > 0 for estimation, got " +
                      std::to_string(light));
  if (!(omega > 0.0 && omega <= 1.0))
    throw ConfigError("omega must be in (0, 1], got " +
                      std::to_string(omega));
  if (!(t_floor > 0.0f && t_floor <= 1.0f))
    throw ConfigError("transmission floor must be in (0, 1]");

  // min over window/channels commutes with the positive scale 1/A, so the
  // dark channel of img/A is dark_channel(img)/A.
  ScalarMap dc = dark_channel(img, patch);
  scatter::TransmissionMap t;
  t.map = ScalarMap(dc.width(), dc.height());
  for (std::size_t i = 0; i < dc.size(); ++i) {
    const double est = 1.0 - omega * (static_cast<double>(dc[i]) / light);
    t.map[i] = static_cast<float>(
        std::clamp(est, static_cast<double>(t_floor), 1.0));
  }
  return t;
}

occlusion::OcclusionField estimate_occlusion(
    const Image& img, const OcclusionEstimateConfig& config) {
  if (!(config.bright_thresh > 0.0))
    throw ConfigError("bright_thresh must be > 0");
  if (config.size_max < 1) throw ConfigError("size_max must be >= 1");
  if (config.background_radius < 1)
    throw ConfigError("background_radius must be >= 1");

  const int w = img.width();
  const int h = img.height();
  const ScalarMap gray = mean_gray(img);
  const ScalarMap background = box_mean(gray, config.background_radius);

  std::vector<char> candidate(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      candidate[static_cast<std::size_t>(y) * w + x] =
          gray(x, y) - background(x, y) > config.bright_thresh ? 1 : 0;

  // 8-connected flood fill; only components small enough to be particles
  // survive (large bright regions are scene content, not weather).
  std::vector<char> kept(candidate.size(), 0);
  std::vector<char> visited(candidate.size(), 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> component;
  for (std::size_t start = 0; start < candidate.size(); ++start) {
    if (!candidate[start] || visited[start]) continue;
    stack.assign(1, start);
    visited[start] = 1;
    component.clear();
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      component.push_back(i);
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
          if (candidate[ni] && !visited[ni]) {
            visited[ni] = 1;
            stack.push_back(ni);
          }
        }
    }
    if (component.size() <= static_cast<std::size_t>(config.size_max))
      for (std::size_t i : component) kept[i] = 1;
  }

  double sum = 0.0;
  std::size_t kept_count = 0;
  for (std::size_t i = 0; i < kept.size(); ++i)
    if (kept[i]) {
      sum += gray[static_cast<std::size_t>(i)];
      ++kept_count;
    }

  occlusion::OcclusionField field;
  field.brightness =
      kept_count ? static_cast<float>(sum / kept_count) : 1.0f;
  field.alpha = ScalarMap(w, h, 0.0f);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (!kept[i]) continue;
      const float excess = gray(x, y) - background(x, y);
      const float denom =
          std::max(field.brightness - background(x, y), 1e-3f);
      field.alpha[i] = std::clamp(excess / denom, 0.0f, 1.0f);
    }
  return field;
}

}  // namespace weatherforge::priors
