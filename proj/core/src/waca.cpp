#include "weatherforge/waca.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "weatherforge/errors.hpp"
#include "weatherforge/rng.hpp"

namespace weatherforge::waca {

using json = nlohmann::json;

FeatureMap::FeatureMap(int width, int height, int channels, float fill) {
  if (width < 0 || height < 0 || channels < 0)
    throw ShapeError("negative feature map dimensions");
  width_ = width;
  height_ = height;
  channels_ = channels;
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

FeatureMap FeatureMap::from_data(int width, int height, int channels,
                                 std::vector<float> data) {
  if (width < 0 || height < 0 || channels < 0)
    throw ShapeError("negative feature map dimensions");
  const std::size_t expected =
      static_cast<std::size_t>(width) * height * channels;
  if (data.size() != expected)
    throw ShapeError("feature map data length " + std::to_string(data.size()) +
                     " != " + std::to_string(expected));
  for (std::size_t i = 0; i < data.size(); ++i)
    if (!std::isfinite(data[i]))
      throw DomainError("non-finite feature value at index " +
                        std::to_string(i));
  FeatureMap m;
  m.width_ = width;
  m.height_ = height;
  m.channels_ = channels;
  m.data_ = std::move(data);
  return m;
}

bool same_spatial_shape(const FeatureMap& a, const FeatureMap& b) {
  return a.width() == b.width() && a.height() == b.height();
}
bool same_spatial_shape(const FeatureMap& a, const ScalarMap& b) {
  return a.width() == b.width() && a.height() == b.height();
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n, 0.0f);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0f;
  return m;
}

FeatureMap downsample_avg(const FeatureMap& x, int r) {
  if (r < 1) throw ConfigError("downsample ratio must be >= 1");
  if (r == 1) return x;
  if (x.width() % r != 0 || x.height() % r != 0)
    throw ShapeError("dimensions " + std::to_string(x.width()) + "x" +
                     std::to_string(x.height()) + " not divisible by " +
                     std::to_string(r));
  FeatureMap out(x.width() / r, x.height() / r, x.channels());
  const double inv = 1.0 / (static_cast<double>(r) * r);
  for (int y = 0; y < out.height(); ++y)
    for (int xx = 0; xx < out.width(); ++xx)
      for (int c = 0; c < x.channels(); ++c) {
        double sum = 0.0;
        for (int dy = 0; dy < r; ++dy)
          for (int dx = 0; dx < r; ++dx)
            sum += x(xx * r + dx, y * r + dy, c);
        out(xx, y, c) = static_cast<float>(sum * inv);
      }
  return out;
}

ScalarMap downsample_avg(const ScalarMap& x, int r) {
  if (r < 1) throw ConfigError("downsample ratio must be >= 1");
  if (r == 1) return x;
  if (x.width() % r != 0 || x.height() % r != 0)
    throw ShapeError("dimensions " + std::to_string(x.width()) + "x" +
                     std::to_string(x.height()) + " not divisible by " +
                     std::to_string(r));
  ScalarMap out(x.width() / r, x.height() / r);
  const double inv = 1.0 / (static_cast<double>(r) * r);
  for (int y = 0; y < out.height(); ++y)
    for (int xx = 0; xx < out.width(); ++xx) {
      double sum = 0.0;
      for (int dy = 0; dy < r; ++dy)
        for (int dx = 0; dx < r; ++dx) sum += x(xx * r + dx, y * r + dy);
      out(xx, y) = static_cast<float>(sum * inv);
    }
  return out;
}

Matrix transmission_similarity(const ScalarMap& t_q, const ScalarMap& t_k) {
  Matrix sim(static_cast<int>(t_q.size()), static_cast<int>(t_k.size()));
  for (std::size_t i = 0; i < t_q.size(); ++i)
    for (std::size_t j = 0; j < t_k.size(); ++j) {
      const double d = static_cast<double>(t_q[i]) - t_k[j];
      sim.at(static_cast<int>(i), static_cast<int>(j)) =
          static_cast<float>(1.0 - d * d);
    }
  return sim;
}

namespace {

void validate_attention(const FeatureMap& xq, const FeatureMap& xk,
                        const AttentionParams& p) {
  if (p.head_count < 1) throw ConfigError("head_count must be >= 1");
  if (p.head_dim < 1) throw ConfigError("head_dim must be >= 1");
  if (!same_spatial_shape(xq, xk))
    throw ShapeError("query/key feature maps differ in spatial shape");
  const int proj = p.head_count * p.head_dim;
  if (p.wq.rows != xq.channels() || p.wq.cols != proj)
    throw ShapeError("W_Q must be " + std::to_string(xq.channels()) + "x" +
                     std::to_string(proj));
  if (p.wk.rows != xk.channels() || p.wk.cols != proj)
    throw ShapeError("W_K must be " + std::to_string(xk.channels()) + "x" +
                     std::to_string(proj));
  if (p.wv.rows != xk.channels() || p.wv.cols != proj)
    throw ShapeError("W_V must be " + std::to_string(xk.channels()) + "x" +
                     std::to_string(proj));
  if (proj != xq.channels())
    throw ShapeError(
        "head_count * head_dim must equal the query channel count so the "
        "concatenated heads preserve the input shape");
}

// rows: pixels of src (flattened, row-major), cols: projection outputs.
Matrix project(const FeatureMap& src, const Matrix& w) {
  const int n = static_cast<int>(src.pixel_count());
  Matrix out(n, w.cols);
  auto data = src.samples();
  const int c = src.channels();
  for (int i = 0; i < n; ++i)
    for (int o = 0; o < w.cols; ++o) {
      double sum = 0.0;
      for (int k = 0; k < c; ++k)
        sum += static_cast<double>(data[static_cast<std::size_t>(i) * c + k]) *
               w.at(k, o);
      out.at(i, o) = static_cast<float>(sum);
    }
  return out;
}

// Cross-attention of query rows against key/value rows with an additive
// per-(i, j) similarity bias. Writes head outputs side by side into out
// (n_q x head_count*head_dim). One trace matrix per head when requested.
void attend(const Matrix& q, const Matrix& k, const Matrix& v, int head_count,
            int head_dim, const std::function<double(int, int)>& bias,
            Matrix& out, AttentionTrace* trace) {
  const int nq = q.rows;
  const int nk = k.rows;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<double> sims(static_cast<std::size_t>(nk));

  for (int h = 0; h < head_count; ++h) {
    const int base = h * head_dim;
    Matrix* weights = nullptr;
    if (trace) {
      trace->weights.emplace_back(nq, nk);
      weights = &trace->weights.back();
    }
    for (int i = 0; i < nq; ++i) {
      double max_sim = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < nk; ++j) {
        double dot = 0.0;
        for (int d = 0; d < head_dim; ++d)
          dot += static_cast<double>(q.at(i, base + d)) * k.at(j, base + d);
        sims[j] = dot * scale + bias(i, j);
        max_sim = std::max(max_sim, sims[j]);
      }
      double denom = 0.0;
      for (int j = 0; j < nk; ++j) {
        sims[j] = std::exp(sims[j] - max_sim);
        denom += sims[j];
      }
      for (int j = 0; j < nk; ++j) {
        const double wgt = sims[j] / denom;
        if (weights) weights->at(i, j) = static_cast<float>(wgt);
        for (int d = 0; d < head_dim; ++d)
          out.at(i, base + d) += static_cast<float>(wgt * v.at(j, base + d));
      }
    }
  }
}

FeatureMap to_feature_map(const Matrix& m, int width, int height) {
  FeatureMap out(width, height, m.cols);
  auto dst = out.samples();
  for (std::size_t i = 0; i < m.data.size(); ++i) dst[i] = m.data[i];
  return out;
}

}  // namespace

FeatureMap tgga_forward(const FeatureMap& x_query, const FeatureMap& x_key,
                        const ScalarMap& t, const AttentionParams& params,
                        AttentionTrace* trace) {
  validate_attention(x_query, x_key, params);
  if (params.downsample_ratio < 1)
    throw ConfigError("downsample ratio must be >= 1");
  if (!same_spatial_shape(x_query, t))
    throw ShapeError("transmission map shape differs from features");

  const FeatureMap keys = downsample_avg(x_key, params.downsample_ratio);
  const ScalarMap t_keys = downsample_avg(t, params.downsample_ratio);

  const Matrix q = project(x_query, params.wq);
  const Matrix k = project(keys, params.wk);
  const Matrix v = project(keys, params.wv);

  const double beta_t = params.beta_t;
  auto bias = [&](int i, int j) {
    const double d = static_cast<double>(t[static_cast<std::size_t>(i)]) -
                     t_keys[static_cast<std::size_t>(j)];
    return beta_t * (1.0 - d * d);
  };

  Matrix out(q.rows, q.cols);
  attend(q, k, v, params.head_count, params.head_dim, bias, out, trace);
  return to_feature_map(out, x_query.width(), x_query.height());
}

FeatureMap ogla_forward(const FeatureMap& x_query, const FeatureMap& x_key,
                        const ScalarMap& alpha, const AttentionParams& params,
                        AttentionTrace* trace) {
  validate_attention(x_query, x_key, params);
  const int win = params.window_size;
  if (win < 1) throw ConfigError("window size must be >= 1");
  if (x_query.width() % win != 0 || x_query.height() % win != 0)
    throw ShapeError("dimensions " + std::to_string(x_query.width()) + "x" +
                     std::to_string(x_query.height()) +
                     " not divisible by window size " + std::to_string(win));
  if (!same_spatial_shape(x_query, alpha))
    throw ShapeError("alpha map shape differs from features");

  const int c = x_query.channels();
  const int ck = x_key.channels();
  const int area = win * win;
  FeatureMap result(x_query.width(), x_query.height(), c);

  // Each window is an independent attention problem; iterate row-major so
  // trace entries have a stable order.
  for (int wy = 0; wy < x_query.height() / win; ++wy)
    for (int wx = 0; wx < x_query.width() / win; ++wx) {
      FeatureMap q_win(win, win, c);
      FeatureMap k_win(win, win, ck);
      std::vector<float> alpha_win(static_cast<std::size_t>(area));
      for (int dy = 0; dy < win; ++dy)
        for (int dx = 0; dx < win; ++dx) {
          const int x = wx * win + dx;
          const int y = wy * win + dy;
          for (int ch = 0; ch < c; ++ch)
            q_win(dx, dy, ch) = x_query(x, y, ch);
          for (int ch = 0; ch < ck; ++ch)
            k_win(dx, dy, ch) = x_key(x, y, ch);
          alpha_win[static_cast<std::size_t>(dy) * win + dx] = alpha(x, y);
        }

      const Matrix q = project(q_win, params.wq);
      const Matrix k = project(k_win, params.wk);
      const Matrix v = project(k_win, params.wv);
      const double beta_o = params.beta_o;
      auto bias = [&](int, int j) {
        return beta_o * (1.0 - alpha_win[static_cast<std::size_t>(j)]);
      };

      Matrix out(q.rows, q.cols);
      attend(q, k, v, params.head_count, params.head_dim, bias, out, trace);
      for (int dy = 0; dy < win; ++dy)
        for (int dx = 0; dx < win; ++dx)
          for (int ch = 0; ch < c; ++ch)
            result(wx * win + dx, wy * win + dy, ch) =
                out.at(dy * win + dx, ch);
    }
  return result;
}

namespace {

void validate_fuser(const FeatureMap& x_t, const FeatureMap& x_o,
                    const ScalarMap& t, const ScalarMap& alpha,
                    const FuserParams& p, int concat_channels) {
  if (!same_spatial_shape(x_t, x_o) || x_t.channels() != x_o.channels())
    throw ShapeError("fusion branches differ in shape");
  if (!same_spatial_shape(x_t, t) || !same_spatial_shape(x_t, alpha))
    throw ShapeError("prior map shape differs from features");
  if (p.kernel_size < 1 || p.kernel_size % 2 == 0)
    throw ConfigError("depthwise kernel size must be odd and >= 1");
  const std::size_t dw_expected = static_cast<std::size_t>(concat_channels) *
                                  p.kernel_size * p.kernel_size;
  if (p.depthwise_weights.size() != dw_expected)
    throw ShapeError("depthwise weights must hold " +
                     std::to_string(dw_expected) + " values");
  if (p.depthwise_bias.size() != static_cast<std::size_t>(concat_channels))
    throw ShapeError("depthwise bias must hold " +
                     std::to_string(concat_channels) + " values");
  if (p.pointwise1.rows != concat_channels)
    throw ShapeError("first pointwise stage must take " +
                     std::to_string(concat_channels) + " channels");
  if (p.pointwise1_bias.size() != static_cast<std::size_t>(p.pointwise1.cols))
    throw ShapeError("first pointwise bias length mismatch");
  if (p.pointwise2.rows != p.pointwise1.cols)
    throw ShapeError("pointwise stages disagree on hidden width");
  if (p.pointwise2.cols != 2)
    throw ShapeError("fusion head must emit exactly 2 channels");
  if (p.pointwise2_bias.size() != 2)
    throw ShapeError("second pointwise bias length mismatch");
}

}  // namespace

FeatureMap waf_weights(const FeatureMap& x_t, const FeatureMap& x_o,
                       const ScalarMap& t, const ScalarMap& alpha,
                       const FuserParams& params) {
  const int c = x_t.channels();
  const int concat_c = 2 * c + 2;
  validate_fuser(x_t, x_o, t, alpha, params, concat_c);

  const int w = x_t.width();
  const int h = x_t.height();
  const int k = params.kernel_size;
  const int kr = k / 2;

  // Channel order of the stacked input: x_t, x_o, t, alpha.
  FeatureMap concat(w, h, concat_c);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < c; ++ch) {
        concat(x, y, ch) = x_t(x, y, ch);
        concat(x, y, c + ch) = x_o(x, y, ch);
      }
      concat(x, y, 2 * c) = t(x, y);
      concat(x, y, 2 * c + 1) = alpha(x, y);
    }

  FeatureMap depthwise(w, h, concat_c);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ch = 0; ch < concat_c; ++ch) {
        double sum = params.depthwise_bias[static_cast<std::size_t>(ch)];
        for (int ky = -kr; ky <= kr; ++ky)
          for (int kx = -kr; kx <= kr; ++kx) {
            const int sx = x + kx;
            const int sy = y + ky;
            if (sx < 0 || sy < 0 || sx >= w || sy >= h) continue;  // zero pad
            const std::size_t widx =
                (static_cast<std::size_t>(ch) * k + (ky + kr)) * k + (kx + kr);
            sum += static_cast<double>(params.depthwise_weights[widx]) *
                   concat(sx, sy, ch);
          }
        depthwise(x, y, ch) = static_cast<float>(sum);
      }

  FeatureMap weights(w, h, 2);
  std::vector<double> hidden(static_cast<std::size_t>(params.pointwise1.cols));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      for (int o = 0; o < params.pointwise1.cols; ++o) {
        double sum = params.pointwise1_bias[static_cast<std::size_t>(o)];
        for (int ch = 0; ch < concat_c; ++ch)
          sum += static_cast<double>(depthwise(x, y, ch)) *
                 params.pointwise1.at(ch, o);
        hidden[static_cast<std::size_t>(o)] = sum;
      }
      for (int o = 0; o < 2; ++o) {
        double sum = params.pointwise2_bias[static_cast<std::size_t>(o)];
        for (int hh = 0; hh < params.pointwise2.rows; ++hh)
          sum += hidden[static_cast<std::size_t>(hh)] *
                 params.pointwise2.at(hh, o);
        weights(x, y, o) = static_cast<float>(1.0 / (1.0 + std::exp(-sum)));
      }
    }
  return weights;
}

FeatureMap waf_fuse(const FeatureMap& x_t, const FeatureMap& x_o,
                    const ScalarMap& t, const ScalarMap& alpha,
                    const FuserParams& params) {
  const FeatureMap weights = waf_weights(x_t, x_o, t, alpha, params);
  FeatureMap out(x_t.width(), x_t.height(), x_t.channels());
  for (int y = 0; y < x_t.height(); ++y)
    for (int x = 0; x < x_t.width(); ++x) {
      const float a_t = weights(x, y, 0);
      const float a_o = weights(x, y, 1);
      for (int ch = 0; ch < x_t.channels(); ++ch)
        out(x, y, ch) = a_t * x_t(x, y, ch) + a_o * x_o(x, y, ch);
    }
  return out;
}

// --- weight generation and serialization -----------------------------------

namespace {

Matrix random_matrix(SplitMix64& rng, int rows, int cols, double scale) {
  Matrix m(rows, cols);
  for (auto& v : m.data)
    v = static_cast<float>(rng.uniform(-scale, scale));
  return m;
}

}  // namespace

AttentionParams random_attention_params(int channels, std::uint64_t seed,
                                        int head_count) {
  if (channels < 1) throw ConfigError("channels must be >= 1");
  if (head_count < 1 || channels % head_count != 0)
    throw ConfigError("head_count must divide the channel count");
  AttentionParams p;
  p.head_count = head_count;
  p.head_dim = channels / head_count;
  SplitMix64 rng(seed);
  // Draw order: beta_t, beta_o, then W_Q, W_K, W_V row-major.
  p.beta_t = static_cast<float>(rng.uniform(0.0, 1.0));
  p.beta_o = static_cast<float>(rng.uniform(0.0, 1.0));
  const double scale = 1.0 / std::sqrt(static_cast<double>(channels));
  p.wq = random_matrix(rng, channels, channels, scale);
  p.wk = random_matrix(rng, channels, channels, scale);
  p.wv = random_matrix(rng, channels, channels, scale);
  return p;
}

FuserParams random_fuser_params(int feature_channels, std::uint64_t seed,
                                int kernel_size) {
  if (feature_channels < 1) throw ConfigError("channels must be >= 1");
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw ConfigError("depthwise kernel size must be odd and >= 1");
  const int concat_c = 2 * feature_channels + 2;
  FuserParams p;
  p.kernel_size = kernel_size;
  SplitMix64 rng(seed);
  const double dw_scale = 1.0 / (kernel_size * kernel_size);
  p.depthwise_weights.resize(static_cast<std::size_t>(concat_c) *
                             kernel_size * kernel_size);
  for (auto& v : p.depthwise_weights)
    v = static_cast<float>(rng.uniform(-dw_scale, dw_scale));
  p.depthwise_bias.resize(static_cast<std::size_t>(concat_c));
  for (auto& v : p.depthwise_bias)
    v = static_cast<float>(rng.uniform(-0.1, 0.1));
  const double pw_scale = 1.0 / std::sqrt(static_cast<double>(concat_c));
  p.pointwise1 = random_matrix(rng, concat_c, concat_c, pw_scale);
  p.pointwise1_bias.resize(static_cast<std::size_t>(concat_c));
  for (auto& v : p.pointwise1_bias)
    v = static_cast<float>(rng.uniform(-0.1, 0.1));
  p.pointwise2 = random_matrix(rng, concat_c, 2, pw_scale);
  p.pointwise2_bias.resize(2);
  for (auto& v : p.pointwise2_bias)
    v = static_cast<float>(rng.uniform(-0.1, 0.1));
  return p;
}

namespace {

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (float v : m.data) data.push_back(static_cast<double>(v));
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", data}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
  const auto& data = j.at("data");
  if (data.size() != m.data.size())
    throw ConfigError("matrix data length mismatch");
  for (std::size_t i = 0; i < m.data.size(); ++i)
    m.data[i] = static_cast<float>(data[i].get<double>());
  return m;
}

json floats_to_json(const std::vector<float>& v) {
  json out = json::array();
  for (float x : v) out.push_back(static_cast<double>(x));
  return out;
}

std::vector<float> floats_from_json(const json& j) {
  std::vector<float> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(static_cast<float>(x.get<double>()));
  return out;
}

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw ConfigError(std::string("invalid JSON in ") + what);
  return j;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string attention_params_to_json_string(const AttentionParams& p,
                                            int indent) {
  json j{{"head_count", p.head_count},
         {"head_dim", p.head_dim},
         {"downsample_ratio", p.downsample_ratio},
         {"window_size", p.window_size},
         {"beta_t", static_cast<double>(p.beta_t)},
         {"beta_o", static_cast<double>(p.beta_o)},
         {"wq", matrix_to_json(p.wq)},
         {"wk", matrix_to_json(p.wk)},
         {"wv", matrix_to_json(p.wv)}};
  return j.dump(indent);
}

AttentionParams attention_params_from_json_string(const std::string& text) {
  const json j = parse_json(text, "attention weights");
  AttentionParams p;
  p.head_count = j.at("head_count").get<int>();
  p.head_dim = j.at("head_dim").get<int>();
  p.downsample_ratio = j.at("downsample_ratio").get<int>();
  p.window_size = j.at("window_size").get<int>();
  p.beta_t = static_cast<float>(j.at("beta_t").get<double>());
  p.beta_o = static_cast<float>(j.at("beta_o").get<double>());
  p.wq = matrix_from_json(j.at("wq"));
  p.wk = matrix_from_json(j.at("wk"));
  p.wv = matrix_from_json(j.at("wv"));
  return p;
}

AttentionParams attention_params_from_json_file(
    const std::filesystem::path& path) {
  return attention_params_from_json_string(slurp(path));
}

std::string fuser_params_to_json_string(const FuserParams& p, int indent) {
  json j{{"kernel_size", p.kernel_size},
         {"depthwise_weights", floats_to_json(p.depthwise_weights)},
         {"depthwise_bias", floats_to_json(p.depthwise_bias)},
         {"pointwise1", matrix_to_json(p.pointwise1)},
         {"pointwise1_bias", floats_to_json(p.pointwise1_bias)},
         {"pointwise2", matrix_to_json(p.pointwise2)},
         {"pointwise2_bias", floats_to_json(p.pointwise2_bias)}};
  return j.dump(indent);
}

FuserParams fuser_params_from_json_string(const std::string& text) {
  const json j = parse_json(text, "fuser weights");
  FuserParams p;
  p.kernel_size = j.at("kernel_size").get<int>();
  p.depthwise_weights = floats_from_json(j.at("depthwise_weights"));
  p.depthwise_bias = floats_from_json(j.at("depthwise_bias"));
  p.pointwise1 = matrix_from_json(j.at("pointwise1"));
  p.pointwise1_bias = floats_from_json(j.at("pointwise1_bias"));
  p.pointwise2 = matrix_from_json(j.at("pointwise2"));
  p.pointwise2_bias = floats_from_json(j.at("pointwise2_bias"));
  return p;
}

FuserParams fuser_params_from_json_file(const std::filesystem::path& path) {
  return fuser_params_from_json_string(slurp(path));
}

}  // namespace weatherforge::waca
