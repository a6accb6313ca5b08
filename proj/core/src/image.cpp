#include "weatherforge/image.hpp"

#include <string>

namespace weatherforge {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw ShapeError("image dimensions must be positive, got " +
                     std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

Image::Image(int width, int height, float fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height * kChannels, fill);
}

Image Image::from_data(int width, int height, std::vector<float> data) {
  check_dims(width, height);
  const std::size_t expected =
      static_cast<std::size_t>(width) * height * kChannels;
  if (data.size() != expected) {
    throw ShapeError("image data size " + std::to_string(data.size()) +
                     " does not match " + std::to_string(width) + "x" +
                     std::to_string(height) + "x3");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(data[i] >= 0.0f && data[i] <= 1.0f)) {
      throw DomainError("image sample " + std::to_string(i) + " = " +
                        std::to_string(data[i]) + " outside [0,1]");
    }
  }
  Image img;
  img.width_ = width;
  img.height_ = height;
  img.data_ = std::move(data);
  return img;
}

ScalarMap::ScalarMap(int width, int height, float fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

ScalarMap ScalarMap::from_data(int width, int height, std::vector<float> data) {
  check_dims(width, height);
  const std::size_t expected = static_cast<std::size_t>(width) * height;
  if (data.size() != expected) {
    throw ShapeError("scalar map data size " + std::to_string(data.size()) +
                     " does not match " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
  ScalarMap map;
  map.width_ = width;
  map.height_ = height;
  map.data_ = std::move(data);
  return map;
}

namespace {
[[noreturn]] void throw_shape(int aw, int ah, int bw, int bh, const char* what) {
  throw ShapeError(std::string(what) + ": shape mismatch " +
                   std::to_string(aw) + "x" + std::to_string(ah) + " vs " +
                   std::to_string(bw) + "x" + std::to_string(bh));
}
}  // namespace

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!same_shape(a, b))
    throw_shape(a.width(), a.height(), b.width(), b.height(), what);
}
void require_same_shape(const Image& a, const ScalarMap& b, const char* what) {
  if (!same_shape(a, b))
    throw_shape(a.width(), a.height(), b.width(), b.height(), what);
}
void require_same_shape(const ScalarMap& a, const ScalarMap& b,
                        const char* what) {
  if (!same_shape(a, b))
    throw_shape(a.width(), a.height(), b.width(), b.height(), what);
}

ScalarMap rgb_to_y(const Image& img) {
  ScalarMap y(img.width(), img.height());
  const std::span<const float> src = img.samples();
  const std::span<float> dst = y.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const float r = src[i * 3 + 0];
    const float g = src[i * 3 + 1];
    const float b = src[i * 3 + 2];
    dst[i] = (65.481f * r + 128.553f * g + 24.966f * b + 16.0f) / 255.0f;
  }
  return y;
}

}  // namespace weatherforge
