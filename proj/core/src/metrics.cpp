#include "weatherforge/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "weatherforge/errors.hpp"

namespace weatherforge::metrics {

std::string to_string(ChannelMode m) {
  return m == ChannelMode::Rgb ? "rgb" : "y";
}

ChannelMode channel_mode_from_string(const std::string& s) {
  if (s == "rgb") return ChannelMode::Rgb;
  if (s == "y") return ChannelMode::Y;
  throw ConfigError("unknown channel mode '" + s + "' (expected rgb or y)");
}

double psnr(const Image& a, const Image& b, ChannelMode mode) {
  require_same_shape(a, b, "psnr inputs");
  double sum = 0.0;
  std::size_t n = 0;
  if (mode == ChannelMode::Rgb) {
    auto sa = a.samples();
    auto sb = b.samples();
    for (std::size_t i = 0; i < sa.size(); ++i) {
      const double d = static_cast<double>(sa[i]) - sb[i];
      sum += d * d;
    }
    n = sa.size();
  } else {
    const ScalarMap ya = rgb_to_y(a);
    const ScalarMap yb = rgb_to_y(b);
    for (std::size_t i = 0; i < ya.size(); ++i) {
      const double d = static_cast<double>(ya[i]) - yb[i];
      sum += d * d;
    }
    n = ya.size();
  }
  if (n == 0) throw ShapeError("psnr of empty images");
  const double mse = sum / static_cast<double>(n);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1 * L)^2
constexpr double kC2 = 0.03 * 0.03;  // (K2 * L)^2

std::array<double, kWindow> gaussian_kernel() {
  std::array<double, kWindow> k{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    k[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += k[static_cast<std::size_t>(i)];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Valid-region separable Gaussian filter: output is (w-10) x (h-10).
std::vector<double> smooth(const std::vector<double>& in, int w, int h,
                           const std::array<double, kWindow>& k) {
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double sum = 0.0;
      for (int i = 0; i < kWindow; ++i)
        sum += k[static_cast<std::size_t>(i)] *
               in[static_cast<std::size_t>(y) * w + x + i];
      rows[static_cast<std::size_t>(y) * ow + x] = sum;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double sum = 0.0;
      for (int i = 0; i < kWindow; ++i)
        sum += k[static_cast<std::size_t>(i)] *
               rows[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = sum;
    }
  return out;
}

double ssim_plane(const std::vector<double>& x, const std::vector<double>& y,
                  int w, int h) {
  const auto kernel = gaussian_kernel();
  const std::size_t n = x.size();
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mu_x = smooth(x, w, h, kernel);
  const auto mu_y = smooth(y, w, h, kernel);
  const auto e_xx = smooth(xx, w, h, kernel);
  const auto e_yy = smooth(yy, w, h, kernel);
  const auto e_xy = smooth(xy, w, h, kernel);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double var_x = e_xx[i] - mu_x[i] * mu_x[i];
    const double var_y = e_yy[i] - mu_y[i] * mu_y[i];
    const double cov = e_xy[i] - mu_x[i] * mu_y[i];
    const double num =
        (2.0 * mu_x[i] * mu_y[i] + kC1) * (2.0 * cov + kC2);
    const double den = (mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + kC1) *
                       (var_x + var_y + kC2);
    total += num / den;
  }
  return total / static_cast<double>(mu_x.size());
}

std::vector<double> channel_plane(const Image& img, int c) {
  std::vector<double> out(img.pixel_count());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out[static_cast<std::size_t>(y) * img.width() + x] = img(x, y, c);
  return out;
}

std::vector<double> luma_plane(const Image& img) {
  const ScalarMap y = rgb_to_y(img);
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i];
  return out;
}

}  // namespace

double ssim(const Image& a, const Image& b, ChannelMode mode) {
  require_same_shape(a, b, "ssim inputs");
  if (a.width() < kWindow || a.height() < kWindow)
    throw ConfigError("ssim needs images at least " + std::to_string(kWindow) +
                      " pixels in each dimension, got " +
                      std::to_string(a.width()) + "x" +
                      std::to_string(a.height()));
  const int w = a.width();
  const int h = a.height();
  if (mode == ChannelMode::Y)
    return ssim_plane(luma_plane(a), luma_plane(b), w, h);
  double total = 0.0;
  for (int c = 0; c < Image::kChannels; ++c)
    total += ssim_plane(channel_plane(a, c), channel_plane(b, c), w, h);
  return total / Image::kChannels;
}

}  // namespace weatherforge::metrics
