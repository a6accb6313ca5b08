#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "weatherforge/errors.hpp"

namespace weatherforge {

// H x W x 3 raster, row-major, RGB interleaved, float samples in [0, 1].
// All physics in this toolkit works on linear intensities in the unit
// interval; file I/O maps to and from this representation.
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  Image(int width, int height, float fill = 0.0f);

  // Takes ownership of `data` (size width*height*3). Throws DomainError if a
  // sample falls outside [0, 1].
  static Image from_data(int width, int height, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  std::size_t sample_count() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float operator()(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }
  float& operator()(int x, int y, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }

  std::span<const float> samples() const { return data_; }
  std::span<float> samples() { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

// H x W scalar field (depth, transmission, alpha, luma). Range constraints
// are owned by the module that produces the map.
class ScalarMap {
 public:
  ScalarMap() = default;
  ScalarMap(int width, int height, float fill = 0.0f);

  static ScalarMap from_data(int width, int height, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float operator()(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  float& operator()(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  float operator[](std::size_t i) const { return data_[i]; }
  float& operator[](std::size_t i) { return data_[i]; }

  std::span<const float> samples() const { return data_; }
  std::span<float> samples() { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

inline bool same_shape(const Image& a, const Image& b) {
  return a.width() == b.width() && a.height() == b.height();
}
inline bool same_shape(const ScalarMap& a, const ScalarMap& b) {
  return a.width() == b.width() && a.height() == b.height();
}
inline bool same_shape(const Image& a, const ScalarMap& b) {
  return a.width() == b.width() && a.height() == b.height();
}

// Throws ShapeError with `what` if shapes differ.
void require_same_shape(const Image& a, const Image& b, const char* what);
void require_same_shape(const Image& a, const ScalarMap& b, const char* what);
void require_same_shape(const ScalarMap& a, const ScalarMap& b,
                        const char* what);

// BT.601 luma with the 16-235 offsets, inputs in [0, 1]:
//   Y = (65.481 R + 128.553 G + 24.966 B + 16) / 255
// Output range [16/255, 235/255].
ScalarMap rgb_to_y(const Image& img);

}  // namespace weatherforge
