#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "weatherforge/image.hpp"

namespace weatherforge::waca {

// Training-free implementation of the weather-guided attention math at toy
// scale: transmission-guided global attention over downsampled keys,
// occlusion-guided local window attention, and the fusion head combining
// the two branches. Weights come from a file or a seeded generator; nothing
// here learns.

// h x w x c feature tensor, row-major with interleaved channels so each
// pixel's feature vector is contiguous. Values must be finite.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int width, int height, int channels, float fill = 0.0f);

  // Validates finiteness; throws DomainError on NaN/Inf, ShapeError on a
  // size mismatch.
  static FeatureMap from_data(int width, int height, int channels,
                              std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  bool empty() const { return data_.empty(); }

  float operator()(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  float& operator()(int x, int y, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<const float> samples() const { return data_; }
  std::span<float> samples() { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

bool same_spatial_shape(const FeatureMap& a, const FeatureMap& b);
bool same_spatial_shape(const FeatureMap& a, const ScalarMap& b);

// Dense row-major matrix, just big enough for projections and attention
// weight tables.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(int r, int c, float fill = 0.0f)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  float at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  float& at(int r, int c) {
    return data[static_cast<std::size_t>(r) * cols + c];
  }

  static Matrix identity(int n);
};

struct AttentionParams {
  int head_count = 1;
  int head_dim = 1;          // d
  int downsample_ratio = 4;  // r, global branch keys
  int window_size = 4;       // w, local branch
  float beta_t = 0.0f;       // transmission guidance scale
  float beta_o = 0.0f;       // occlusion guidance scale
  Matrix wq, wk, wv;         // input channels -> head_count * head_dim
};

// Softmax weight rows for inspection: one matrix per head for the global
// branch, one per (window, head) for the local branch.
struct AttentionTrace {
  std::vector<Matrix> weights;
};

// Non-overlapping r x r mean pooling. r = 1 is the identity; indivisible
// dimensions throw ShapeError.
FeatureMap downsample_avg(const FeatureMap& x, int r);
ScalarMap downsample_avg(const ScalarMap& x, int r);

// sim(i, j) = 1 - (t_q[i] - t_k[j])^2 over the flattened maps; stays in
// [0, 1] for t in [0, 1] and is symmetric in the two values.
Matrix transmission_similarity(const ScalarMap& t_q, const ScalarMap& t_k);

// Global branch: queries from x_query at full resolution, keys/values from
// the r x r mean-pooled x_key; similarity QK^T/sqrt(d) plus
// beta_t * (1 - (t_i - t_kj)^2) with t pooled on the key side; per-row
// softmax (max-subtracted); heads concatenated. Output shape = x_query's.
FeatureMap tgga_forward(const FeatureMap& x_query, const FeatureMap& x_key,
                        const ScalarMap& t, const AttentionParams& params,
                        AttentionTrace* trace = nullptr);

// Local branch: independent cross-attention inside each non-overlapping
// w x w window, key bias beta_o * (1 - alpha_j). Output shape = x_query's.
FeatureMap ogla_forward(const FeatureMap& x_query, const FeatureMap& x_key,
                        const ScalarMap& alpha, const AttentionParams& params,
                        AttentionTrace* trace = nullptr);

// Fusion head: concat(Xt, Xo, t, alpha) -> depthwise k x k (zero padding)
// -> 1x1 -> 1x1 -> sigmoid, yielding per-pixel weights (a_t, a_o); the
// result is a_t * Xt + a_o * Xo.
struct FuserParams {
  int kernel_size = 3;
  std::vector<float> depthwise_weights;  // concat channels * k * k
  std::vector<float> depthwise_bias;     // concat channels
  Matrix pointwise1;                     // concat channels -> hidden
  std::vector<float> pointwise1_bias;
  Matrix pointwise2;                     // hidden -> 2 (a_t, a_o logits)
  std::vector<float> pointwise2_bias;
};

FeatureMap waf_fuse(const FeatureMap& x_t, const FeatureMap& x_o,
                    const ScalarMap& t, const ScalarMap& alpha,
                    const FuserParams& params);

// Per-pixel fusion weights alone (a_t, a_o as a 2-channel map), for tests
// and inspection.
FeatureMap waf_weights(const FeatureMap& x_t, const FeatureMap& x_o,
                       const ScalarMap& t, const ScalarMap& alpha,
                       const FuserParams& params);

// Deterministic weight generators (uniform in +-1/sqrt(fan_in)).
AttentionParams random_attention_params(int channels, std::uint64_t seed,
                                        int head_count = 1);
FuserParams random_fuser_params(int feature_channels, std::uint64_t seed,
                                int kernel_size = 3);

// JSON (de)serialization of the weight bundles.
std::string attention_params_to_json_string(const AttentionParams& p,
                                            int indent = 2);
AttentionParams attention_params_from_json_string(const std::string& text);
AttentionParams attention_params_from_json_file(
    const std::filesystem::path& path);
std::string fuser_params_to_json_string(const FuserParams& p, int indent = 2);
FuserParams fuser_params_from_json_string(const std::string& text);
FuserParams fuser_params_from_json_file(const std::filesystem::path& path);

}  // namespace weatherforge::waca
