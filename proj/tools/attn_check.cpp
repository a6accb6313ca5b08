#include "attn_check.hpp"

#include <cmath>
#include <vector>

#include "weatherforge/rng.hpp"
#include "weatherforge/waca.hpp"

namespace weatherforge::cli {

using waca::AttentionParams;
using waca::AttentionTrace;
using waca::FeatureMap;
using waca::FuserParams;

namespace {

// The reference computations below are written as plain dense loops in
// double precision, straight from the formulas, on purpose sharing nothing
// with the library implementation beyond the containers.

std::vector<double> oracle_project(const std::vector<double>& x, int n, int c,
                                   const waca::Matrix& w) {
  std::vector<double> out(static_cast<std::size_t>(n) * w.cols, 0.0);
  for (int i = 0; i < n; ++i)
    for (int o = 0; o < w.cols; ++o)
      for (int k = 0; k < c; ++k)
        out[static_cast<std::size_t>(i) * w.cols + o] +=
            x[static_cast<std::size_t>(i) * c + k] * w.at(k, o);
  return out;
}

std::vector<double> to_double(std::span<const float> s) {
  return std::vector<double>(s.begin(), s.end());
}

// Full-resolution queries against r x r mean-pooled keys with the
// transmission-similarity bias.
std::vector<double> oracle_tgga(const FeatureMap& xq, const FeatureMap& xk,
                                const ScalarMap& t,
                                const AttentionParams& p) {
  const int w = xq.width();
  const int h = xq.height();
  const int c = xq.channels();
  const int r = p.downsample_ratio;
  const int kw = w / r;
  const int kh = h / r;
  const int nq = w * h;
  const int nk = kw * kh;
  const int dim = p.head_count * p.head_dim;

  std::vector<double> pooled(static_cast<std::size_t>(nk) * xk.channels());
  std::vector<double> t_pooled(static_cast<std::size_t>(nk));
  for (int y = 0; y < kh; ++y)
    for (int x = 0; x < kw; ++x) {
      for (int ch = 0; ch < xk.channels(); ++ch) {
        double sum = 0.0;
        for (int dy = 0; dy < r; ++dy)
          for (int dx = 0; dx < r; ++dx)
            sum += xk(x * r + dx, y * r + dy, ch);
        pooled[(static_cast<std::size_t>(y) * kw + x) * xk.channels() + ch] =
            sum / (r * r);
      }
      double tsum = 0.0;
      for (int dy = 0; dy < r; ++dy)
        for (int dx = 0; dx < r; ++dx) tsum += t(x * r + dx, y * r + dy);
      t_pooled[static_cast<std::size_t>(y) * kw + x] = tsum / (r * r);
    }

  const auto q = oracle_project(to_double(xq.samples()), nq, c, p.wq);
  const auto k = oracle_project(pooled, nk, xk.channels(), p.wk);
  const auto v = oracle_project(pooled, nk, xk.channels(), p.wv);

  std::vector<double> out(static_cast<std::size_t>(nq) * dim, 0.0);
  for (int head = 0; head < p.head_count; ++head) {
    const int base = head * p.head_dim;
    for (int i = 0; i < nq; ++i) {
      std::vector<double> e(static_cast<std::size_t>(nk));
      double denom = 0.0;
      for (int j = 0; j < nk; ++j) {
        double dot = 0.0;
        for (int d = 0; d < p.head_dim; ++d)
          dot += q[static_cast<std::size_t>(i) * dim + base + d] *
                 k[static_cast<std::size_t>(j) * dim + base + d];
        const double diff =
            static_cast<double>(t[static_cast<std::size_t>(i)]) -
            t_pooled[static_cast<std::size_t>(j)];
        const double sim = dot / std::sqrt(static_cast<double>(p.head_dim)) +
                           p.beta_t * (1.0 - diff * diff);
        e[static_cast<std::size_t>(j)] = std::exp(sim);
        denom += e[static_cast<std::size_t>(j)];
      }
      for (int j = 0; j < nk; ++j)
        for (int d = 0; d < p.head_dim; ++d)
          out[static_cast<std::size_t>(i) * dim + base + d] +=
              e[static_cast<std::size_t>(j)] / denom *
              v[static_cast<std::size_t>(j) * dim + base + d];
    }
  }
  return out;
}

// Independent window cross-attention with the (1 - alpha) key bias.
std::vector<double> oracle_ogla(const FeatureMap& xq, const FeatureMap& xk,
                                const ScalarMap& alpha,
                                const AttentionParams& p) {
  const int w = xq.width();
  const int h = xq.height();
  const int c = xq.channels();
  const int win = p.window_size;
  const int dim = p.head_count * p.head_dim;
  std::vector<double> out(static_cast<std::size_t>(w) * h * dim, 0.0);

  for (int wy = 0; wy < h / win; ++wy)
    for (int wx = 0; wx < w / win; ++wx) {
      const int n = win * win;
      std::vector<double> qin(static_cast<std::size_t>(n) * c);
      std::vector<double> kin(static_cast<std::size_t>(n) * xk.channels());
      std::vector<double> a(static_cast<std::size_t>(n));
      std::vector<int> px(static_cast<std::size_t>(n)), py(
          static_cast<std::size_t>(n));
      for (int dy = 0; dy < win; ++dy)
        for (int dx = 0; dx < win; ++dx) {
          const int idx = dy * win + dx;
          const int x = wx * win + dx;
          const int y = wy * win + dy;
          px[static_cast<std::size_t>(idx)] = x;
          py[static_cast<std::size_t>(idx)] = y;
          for (int ch = 0; ch < c; ++ch)
            qin[static_cast<std::size_t>(idx) * c + ch] = xq(x, y, ch);
          for (int ch = 0; ch < xk.channels(); ++ch)
            kin[static_cast<std::size_t>(idx) * xk.channels() + ch] =
                xk(x, y, ch);
          a[static_cast<std::size_t>(idx)] = alpha(x, y);
        }
      const auto q = oracle_project(qin, n, c, p.wq);
      const auto k = oracle_project(kin, n, xk.channels(), p.wk);
      const auto v = oracle_project(kin, n, xk.channels(), p.wv);

      for (int head = 0; head < p.head_count; ++head) {
        const int base = head * p.head_dim;
        for (int i = 0; i < n; ++i) {
          std::vector<double> e(static_cast<std::size_t>(n));
          double denom = 0.0;
          for (int j = 0; j < n; ++j) {
            double dot = 0.0;
            for (int d = 0; d < p.head_dim; ++d)
              dot += q[static_cast<std::size_t>(i) * dim + base + d] *
                     k[static_cast<std::size_t>(j) * dim + base + d];
            const double sim =
                dot / std::sqrt(static_cast<double>(p.head_dim)) +
                p.beta_o * (1.0 - a[static_cast<std::size_t>(j)]);
            e[static_cast<std::size_t>(j)] = std::exp(sim);
            denom += e[static_cast<std::size_t>(j)];
          }
          for (int j = 0; j < n; ++j)
            for (int d = 0; d < p.head_dim; ++d)
              out[(static_cast<std::size_t>(
                       py[static_cast<std::size_t>(i)]) *
                       w +
                   px[static_cast<std::size_t>(i)]) *
                      dim +
                  base + d] += e[static_cast<std::size_t>(j)] / denom *
                               v[static_cast<std::size_t>(j) * dim + base + d];
        }
      }
    }
  return out;
}

// Direct depthwise + two pointwise stages + logistic + combination.
std::vector<double> oracle_waf(const FeatureMap& xt, const FeatureMap& xo,
                               const ScalarMap& t, const ScalarMap& alpha,
                               const FuserParams& p) {
  const int w = xt.width();
  const int h = xt.height();
  const int c = xt.channels();
  const int cc = 2 * c + 2;
  const int k = p.kernel_size;
  const int kr = k / 2;

  auto concat_at = [&](int x, int y, int ch) -> double {
    if (ch < c) return xt(x, y, ch);
    if (ch < 2 * c) return xo(x, y, ch - c);
    if (ch == 2 * c) return t(x, y);
    return alpha(x, y);
  };

  std::vector<double> out(static_cast<std::size_t>(w) * h * c, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::vector<double> dw(static_cast<std::size_t>(cc));
      for (int ch = 0; ch < cc; ++ch) {
        double sum = p.depthwise_bias[static_cast<std::size_t>(ch)];
        for (int ky = -kr; ky <= kr; ++ky)
          for (int kx = -kr; kx <= kr; ++kx) {
            const int sx = x + kx;
            const int sy = y + ky;
            if (sx < 0 || sy < 0 || sx >= w || sy >= h) continue;
            sum += static_cast<double>(
                       p.depthwise_weights[(static_cast<std::size_t>(ch) * k +
                                            (ky + kr)) *
                                               k +
                                           (kx + kr)]) *
                   concat_at(sx, sy, ch);
          }
        dw[static_cast<std::size_t>(ch)] = sum;
      }
      std::vector<double> hidden(
          static_cast<std::size_t>(p.pointwise1.cols));
      for (int o = 0; o < p.pointwise1.cols; ++o) {
        double sum = p.pointwise1_bias[static_cast<std::size_t>(o)];
        for (int ch = 0; ch < cc; ++ch)
          sum += dw[static_cast<std::size_t>(ch)] * p.pointwise1.at(ch, o);
        hidden[static_cast<std::size_t>(o)] = sum;
      }
      double gate[2];
      for (int o = 0; o < 2; ++o) {
        double sum = p.pointwise2_bias[static_cast<std::size_t>(o)];
        for (int hh = 0; hh < p.pointwise2.rows; ++hh)
          sum += hidden[static_cast<std::size_t>(hh)] * p.pointwise2.at(hh, o);
        gate[o] = 1.0 / (1.0 + std::exp(-sum));
      }
      for (int ch = 0; ch < c; ++ch)
        out[(static_cast<std::size_t>(y) * w + x) * c + ch] =
            gate[0] * xt(x, y, ch) + gate[1] * xo(x, y, ch);
    }
  return out;
}

FeatureMap random_features(int w, int h, int c, SplitMix64& rng,
                           double lo = -1.0, double hi = 1.0) {
  FeatureMap m(w, h, c);
  for (auto& v : m.samples()) v = static_cast<float>(rng.uniform(lo, hi));
  return m;
}

ScalarMap random_map(int w, int h, SplitMix64& rng) {
  ScalarMap m(w, h);
  for (auto& v : m.samples()) v = static_cast<float>(rng.uniform(0.0, 1.0));
  return m;
}

double max_abs_diff(std::span<const float> got,
                    const std::vector<double>& want) {
  double m = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(got[i]) - want[i]));
  return m;
}

double max_abs_diff(std::span<const float> a, std::span<const float> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
  return m;
}

CheckResult make_result(std::string name, double err, double tol) {
  return {std::move(name), err, tol, err <= tol};
}

}  // namespace

std::vector<CheckResult> run_attention_checks(std::uint64_t seed) {
  std::vector<CheckResult> results;

  // Shared fixtures: 8x8 maps for the row/reduction checks, 4x4 for the
  // oracle comparisons.
  SplitMix64 rng(derive_seed(seed, 1));
  AttentionParams p8 = waca::random_attention_params(4, derive_seed(seed, 2));
  p8.downsample_ratio = 2;
  p8.window_size = 4;
  const FeatureMap xq8 = random_features(8, 8, 4, rng);
  const FeatureMap xk8 = random_features(8, 8, 4, rng);
  const ScalarMap t8 = random_map(8, 8, rng);
  const ScalarMap a8 = random_map(8, 8, rng);

  {
    AttentionTrace trace;
    (void)waca::tgga_forward(xq8, xk8, t8, p8, &trace);
    double err = 0.0;
    for (const auto& wmat : trace.weights)
      for (int i = 0; i < wmat.rows; ++i) {
        double sum = 0.0;
        for (int j = 0; j < wmat.cols; ++j) sum += wmat.at(i, j);
        err = std::max(err, std::abs(sum - 1.0));
      }
    results.push_back(make_result("tgga softmax rows sum to 1", err, 1e-6));
  }
  {
    AttentionTrace trace;
    (void)waca::ogla_forward(xq8, xk8, a8, p8, &trace);
    double err = 0.0;
    for (const auto& wmat : trace.weights)
      for (int i = 0; i < wmat.rows; ++i) {
        double sum = 0.0;
        for (int j = 0; j < wmat.cols; ++j) sum += wmat.at(i, j);
        err = std::max(err, std::abs(sum - 1.0));
      }
    results.push_back(make_result("ogla softmax rows sum to 1", err, 1e-6));
  }
  {
    const ScalarMap uniform_t(8, 8, 0.37f);
    AttentionParams unbiased = p8;
    unbiased.beta_t = 0.0f;
    const FeatureMap with = waca::tgga_forward(xq8, xk8, uniform_t, p8);
    const FeatureMap without =
        waca::tgga_forward(xq8, xk8, uniform_t, unbiased);
    results.push_back(make_result(
        "uniform-t tgga equals beta_t=0",
        max_abs_diff(with.samples(), without.samples()), 1e-6));
  }
  {
    const ScalarMap zero_alpha(8, 8, 0.0f);
    AttentionParams unbiased = p8;
    unbiased.beta_o = 0.0f;
    const FeatureMap with = waca::ogla_forward(xq8, xk8, zero_alpha, p8);
    const FeatureMap without =
        waca::ogla_forward(xq8, xk8, zero_alpha, unbiased);
    results.push_back(make_result(
        "zero-alpha ogla equals beta_o=0",
        max_abs_diff(with.samples(), without.samples()), 1e-6));
  }
  {
    const ScalarMap uniform_alpha(8, 8, 0.4f);
    AttentionParams unbiased = p8;
    unbiased.beta_o = 0.0f;
    const FeatureMap with = waca::ogla_forward(xq8, xk8, uniform_alpha, p8);
    const FeatureMap without =
        waca::ogla_forward(xq8, xk8, uniform_alpha, unbiased);
    results.push_back(make_result(
        "uniform-alpha ogla equals beta_o=0",
        max_abs_diff(with.samples(), without.samples()), 1e-6));
  }
  {
    // Single key: softmax over one element is 1, so the output is the value
    // projection regardless of the bias scale.
    AttentionParams single;
    single.head_count = 1;
    single.head_dim = 1;
    single.downsample_ratio = 1;
    single.window_size = 1;
    single.beta_t = 7.5f;
    single.wq = waca::Matrix::identity(1);
    single.wk = waca::Matrix::identity(1);
    single.wv = waca::Matrix::identity(1);
    const FeatureMap q1 = waca::FeatureMap::from_data(1, 1, 1, {0.3f});
    const FeatureMap k1 = waca::FeatureMap::from_data(1, 1, 1, {-0.8f});
    const ScalarMap t1(1, 1, 0.5f);
    const FeatureMap out = waca::tgga_forward(q1, k1, t1, single);
    results.push_back(make_result(
        "single key returns its value",
        std::abs(static_cast<double>(out(0, 0, 0)) - (-0.8)), 1e-6));
  }

  // Oracle comparisons on 4x4 fixtures with two heads.
  AttentionParams p4 = waca::random_attention_params(2, derive_seed(seed, 3),
                                                    /*head_count=*/2);
  p4.downsample_ratio = 2;
  p4.window_size = 2;
  const FeatureMap xq4 = random_features(4, 4, 2, rng);
  const FeatureMap xk4 = random_features(4, 4, 2, rng);
  const ScalarMap t4 = random_map(4, 4, rng);
  const ScalarMap a4 = random_map(4, 4, rng);
  {
    const FeatureMap got = waca::tgga_forward(xq4, xk4, t4, p4);
    results.push_back(make_result(
        "tgga matches dense-loop reference",
        max_abs_diff(got.samples(), oracle_tgga(xq4, xk4, t4, p4)), 1e-5));
  }
  {
    const FeatureMap got = waca::ogla_forward(xq4, xk4, a4, p4);
    results.push_back(make_result(
        "ogla matches dense-loop reference",
        max_abs_diff(got.samples(), oracle_ogla(xq4, xk4, a4, p4)), 1e-5));
  }
  {
    const FuserParams fp = waca::random_fuser_params(2, derive_seed(seed, 4));
    const FeatureMap got = waca::waf_fuse(xq4, xk4, t4, a4, fp);
    results.push_back(make_result(
        "waf matches direct-convolution reference",
        max_abs_diff(got.samples(), oracle_waf(xq4, xk4, t4, a4, fp)), 1e-5));
  }
  {
    // Saturated gates: huge logit biases drive (a_t, a_o) to (1, 0).
    FuserParams fp = waca::random_fuser_params(2, derive_seed(seed, 5));
    for (auto& v : fp.pointwise2.data) v = 0.0f;
    fp.pointwise2_bias = {50.0f, -50.0f};
    const FeatureMap got = waca::waf_fuse(xq4, xk4, t4, a4, fp);
    results.push_back(make_result(
        "saturated waf gates return the first branch",
        max_abs_diff(got.samples(), xq4.samples()), 1e-6));
  }
  {
    const FuserParams fp = waca::random_fuser_params(2, derive_seed(seed, 6));
    const FeatureMap wmap = waca::waf_weights(xq4, xk4, t4, a4, fp);
    double err = 0.0;
    for (float v : wmap.samples())
      err = std::max(
          err, std::max(static_cast<double>(-v), static_cast<double>(v) - 1.0));
    results.push_back(
        make_result("waf gates stay within [0, 1]", std::max(err, 0.0), 0.0));
  }
  return results;
}

}  // namespace weatherforge::cli
