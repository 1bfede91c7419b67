#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfepi/blur.hpp"
#include "lfepi/cnn.hpp"
#include "lfepi/epi.hpp"
#include "lfepi/interp.hpp"
#include "lfepi/light_field.hpp"

namespace lfepi {

/// Anti-aliased band in a line scene. Position is the band center at the
/// central view; in view a the center sits at x0 + disparity*(a - a_center).
struct LinePrimitive {
  double x0 = 0.0;
  double disparity = 0.0;  // pixels per angular step; larger = nearer
  double color = 1.0;
  double width = 1.0;
};

struct LineScene {
  std::vector<LinePrimitive> primitives;
  double background = 0.0;
};

/// Renders the scene into an EPI with horizontal supersampling and box-filter
/// downsampling. Occlusion: the covering primitive with the largest disparity
/// wins. Disparities must be pairwise distinct (draw order would otherwise be
/// ambiguous).
inline EPI render_line_epi(const LineScene& scene, int n_views, int width, int supersample = 8) {
  if (n_views < 1 || width < 1) throw std::invalid_argument("render_line_epi: bad dimensions");
  if (supersample < 1) throw std::invalid_argument("render_line_epi: supersample must be >= 1");
  for (size_t i = 0; i < scene.primitives.size(); ++i) {
    if (!(scene.primitives[i].width > 0.0))
      throw std::invalid_argument("render_line_epi: primitive width must be positive");
    for (size_t j = i + 1; j < scene.primitives.size(); ++j)
      if (scene.primitives[i].disparity == scene.primitives[j].disparity)
        throw std::invalid_argument("render_line_epi: primitive disparities must be distinct");
  }
  EPI epi(n_views, width);
  double dmax = 0.0;
  for (const auto& p : scene.primitives) dmax = std::max(dmax, std::abs(p.disparity));
  epi.max_disparity_px = dmax;
  const double ac = epi.center_row();
  for (int a = 0; a < n_views; ++a) {
    const double da = static_cast<double>(a) - ac;
    double* row = epi.row(a);
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int ss = 0; ss < supersample; ++ss) {
        const double u = static_cast<double>(x) + (ss + 0.5) / supersample - 0.5;
        double color = scene.background;
        double best_d = -std::numeric_limits<double>::infinity();
        for (const auto& p : scene.primitives) {
          const double center = p.x0 + p.disparity * da;
          if (std::abs(u - center) <= 0.5 * p.width && p.disparity > best_d) {
            best_d = p.disparity;
            color = p.color;
          }
        }
        acc += color;
      }
      row[x] = acc / supersample;
    }
  }
  return epi;
}

/// One plane of a layered scene: texture plus coverage (alpha), both at the
/// view resolution, translated per view by its disparity.
struct Layer {
  Image2D texture;
  Image2D alpha;  // [0,1]; empty means fully opaque
  double disparity_s = 0.0;
  double disparity_t = 0.0;
};

struct LayeredScene {
  std::vector<Layer> layers;  // composited far-to-near (by disparity_s)
};

namespace detail {

inline double sample_image_cubic(const Image2D& img, double y, double x) {
  const double fy = std::floor(y);
  const int iy = static_cast<int>(fy);
  const double ty = y - fy;
  if (ty == 0.0) {
    const int r = std::clamp(iy, 0, img.rows - 1);
    return sample_row_cubic(img.row(r), img.cols, x);
  }
  const CubicWeights cw = catmull_rom_weights(ty);
  double acc = 0.0;
  for (int k = -1; k <= 2; ++k) {
    const int r = std::clamp(iy + k, 0, img.rows - 1);
    acc += cw.w[k + 1] * sample_row_cubic(img.row(r), img.cols, x);
  }
  return acc;
}

}  // namespace detail

/// Shifts each layer by (disparity_t*(t-t_c), disparity_s*(s-s_c)) with cubic
/// sampling and replicate borders, compositing far-to-near through the layer
/// alphas. Layers are ordered by disparity_s, which must be distinct.
inline LightField4D render_layered_lightfield(const LayeredScene& scene, int T, int S, int H,
                                              int W) {
  if (T < 1 || S < 1 || H < 1 || W < 1)
    throw std::invalid_argument("render_layered_lightfield: bad dimensions");
  if (scene.layers.empty()) throw std::invalid_argument("render_layered_lightfield: no layers");
  for (const Layer& l : scene.layers) {
    if (l.texture.rows != H || l.texture.cols != W)
      throw std::invalid_argument("render_layered_lightfield: texture/dim mismatch");
    if (l.alpha.rows != 0 && !l.alpha.same_shape(l.texture))
      throw std::invalid_argument("render_layered_lightfield: alpha/texture mismatch");
  }
  std::vector<const Layer*> order;
  for (const Layer& l : scene.layers) order.push_back(&l);
  std::sort(order.begin(), order.end(),
            [](const Layer* a, const Layer* b) { return a->disparity_s < b->disparity_s; });
  for (size_t i = 1; i < order.size(); ++i)
    if (order[i]->disparity_s == order[i - 1]->disparity_s)
      throw std::invalid_argument("render_layered_lightfield: layer disparities must be distinct");

  LightField4D lf(T, S, H, W, 1, ChannelSpace::Luma);
  const double tc = 0.5 * (T - 1), sc = 0.5 * (S - 1);
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      for (const Layer* l : order) {
        const double dy = l->disparity_t * (static_cast<double>(t) - tc);
        const double dx = l->disparity_s * (static_cast<double>(s) - sc);
        const bool integer_shift = (dy == std::round(dy)) && (dx == std::round(dx));
        for (int y = 0; y < H; ++y) {
          for (int x = 0; x < W; ++x) {
            double v, a;
            if (integer_shift) {
              const int sy = std::clamp(y - static_cast<int>(dy), 0, H - 1);
              const int sx = std::clamp(x - static_cast<int>(dx), 0, W - 1);
              v = l->texture.at(sy, sx);
              a = l->alpha.rows ? l->alpha.at(sy, sx) : 1.0;
            } else {
              v = detail::sample_image_cubic(l->texture, y - dy, x - dx);
              a = l->alpha.rows
                      ? std::clamp(detail::sample_image_cubic(l->alpha, y - dy, x - dx), 0.0, 1.0)
                      : 1.0;
            }
            double& dst = lf.at(t, s, y, x, 0);
            dst = a * v + (1.0 - a) * dst;
          }
        }
      }
    }
  }
  return lf;
}

// ---------------------------------------------------------------------------
// Deterministic benchmark suite
// ---------------------------------------------------------------------------

struct SceneMeta {
  std::string name;
  std::string split;  // "train" | "test"
  std::string kind;   // "gradient" | "smoothnoise" | "bands"
  double sparse_disparity = 0.0;  // max pixels between sparse neighbors
  int dense_views = 9;            // per axis
  int sparse_step = 4;
};

struct BenchScene {
  SceneMeta meta;
  LightField4D dense;
  LightField4D sparse;
};

namespace detail {

inline void smooth_image(Image2D& img, double sigma) {
  const BlurKernel k = make_kernel(KernelKind::Gaussian, sigma);
  const int h = k.half();
  Image2D tmp(img.rows, img.cols);
  for (int y = 0; y < img.rows; ++y)
    for (int x = 0; x < img.cols; ++x) {
      double acc = 0.0;
      for (int i = -h; i <= h; ++i)
        acc += k.taps[h + i] * img.at(y, std::clamp(x - i, 0, img.cols - 1));
      tmp.at(y, x) = acc;
    }
  for (int y = 0; y < img.rows; ++y)
    for (int x = 0; x < img.cols; ++x) {
      double acc = 0.0;
      for (int i = -h; i <= h; ++i)
        acc += k.taps[h + i] * tmp.at(std::clamp(y - i, 0, img.rows - 1), x);
      img.at(y, x) = acc;
    }
}

inline double edge_window(int i, int n, int margin) {
  const double d = std::min(i, n - 1 - i);
  if (d >= margin) return 1.0;
  const double t = d / margin;
  return t * t * (3.0 - 2.0 * t);  // smoothstep
}

/// Blends the texture toward its mean near the borders so replicate
/// extension during shifting/blurring stays consistent with the content.
inline void taper_to_mean(Image2D& img, int margin) {
  const double m = mean_of(img.data);
  for (int y = 0; y < img.rows; ++y)
    for (int x = 0; x < img.cols; ++x) {
      const double w = edge_window(y, img.rows, margin) * edge_window(x, img.cols, margin);
      img.at(y, x) = m + (img.at(y, x) - m) * w;
    }
}

inline Image2D gradient_texture(GaussianRng& rng, int H, int W) {
  Image2D img(H, W);
  const double gx = 0.15 + 0.25 * rng.uniform01();
  const double gy = 0.05 + 0.15 * rng.uniform01();
  const double fx = (0.5 + rng.uniform01()) / W;
  const double fy = (0.5 + rng.uniform01()) / H;
  const double ph = 2.0 * std::numbers::pi * rng.uniform01();
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const double v = 0.45 + gx * (static_cast<double>(x) / W - 0.5) +
                       gy * (static_cast<double>(y) / H - 0.5) +
                       0.18 * std::sin(2.0 * std::numbers::pi * (fx * x + fy * y) + ph);
      img.at(y, x) = std::clamp(v, 0.05, 0.95);
    }
  taper_to_mean(img, 6);
  return img;
}

inline Image2D smooth_noise_texture(GaussianRng& rng, int H, int W, double sigma) {
  Image2D img(H, W);
  for (double& v : img.data) v = rng.uniform01();
  smooth_image(img, sigma);
  // renormalize to a fixed contrast band
  double lo = img.data[0], hi = img.data[0];
  for (double v : img.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  for (double& v : img.data) v = 0.2 + 0.6 * (v - lo) / span;
  taper_to_mean(img, 6);
  return img;
}

inline Image2D blob_alpha(GaussianRng& rng, int H, int W, int n_blobs) {
  Image2D a(H, W, 0.0);
  for (int i = 0; i < n_blobs; ++i) {
    const double cx = W * (0.25 + 0.5 * rng.uniform01());
    const double cy = H * (0.25 + 0.5 * rng.uniform01());
    const double r = 4.0 + 5.0 * rng.uniform01();
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        a.at(y, x) += std::exp(-d2 / (2.0 * r * r));
      }
  }
  for (double& v : a.data) v = std::min(1.0, v);
  taper_to_mean(a, 8);  // alpha mean is small; tapering pulls edges toward 0
  for (double& v : a.data) v = std::clamp(v, 0.0, 1.0);
  return a;
}

inline Image2D band_alpha(GaussianRng& rng, int H, int W, int n_bands, double max_shift) {
  Image2D a(H, W, 0.0);
  const double soft = 1.5;  // edge ramp width in pixels
  const double lo_c = max_shift + 10.0, hi_c = W - 1 - max_shift - 10.0;
  for (int b = 0; b < n_bands; ++b) {
    const double c = lo_c + (hi_c - lo_c) * rng.uniform01();
    const double w = 3.0 + 9.0 * rng.uniform01();
    for (int x = 0; x < W; ++x) {
      const double dist = std::abs(x - c) - 0.5 * w;
      double cov;
      if (dist <= -soft) cov = 1.0;
      else if (dist >= 0.0) cov = 0.0;
      else {
        const double t = -dist / soft;
        cov = t * t * (3.0 - 2.0 * t);
      }
      for (int y = 0; y < H; ++y) a.at(y, x) = std::max(a.at(y, x), cov);
    }
  }
  return a;
}

inline BenchScene make_scene(GaussianRng& rng, const std::string& name, const std::string& split,
                             const std::string& kind, double sparse_disparity, int dense_views,
                             int H, int W) {
  const int step = 4;
  const double delta = sparse_disparity / step;  // disparity per dense angular step
  LayeredScene scene;
  if (kind == "bands") {
    // occluding solid bands over a textured background: the aliasing-prone
    // regime the restoration network is meant for
    Layer bg;
    bg.texture = smooth_noise_texture(rng, H, W, 1.6);
    bg.disparity_s = bg.disparity_t = 0.25 * delta;
    Layer fg;
    fg.texture = Image2D(H, W);
    const double base = 0.08 + 0.12 * rng.uniform01();
    const double fy = (1.0 + rng.uniform01()) / H;
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        fg.texture.at(y, x) = base + 0.1 * (static_cast<double>(x) / W) +
                              0.12 * std::sin(2.0 * std::numbers::pi * fy * y);
    const double max_shift = delta * 0.5 * (dense_views - 1) + 2.0;
    fg.alpha = band_alpha(rng, H, W, 4, max_shift);
    fg.disparity_s = fg.disparity_t = delta;
    scene.layers = {bg, fg};
  } else if (kind == "texture") {
    // lightly smoothed noise keeps genuine high frequencies in x and y
    Layer bg;
    bg.texture = smooth_noise_texture(rng, H, W, 1.2);
    bg.disparity_s = bg.disparity_t = 0.25 * delta;
    Layer fg;
    fg.texture = smooth_noise_texture(rng, H, W, 1.4);
    fg.alpha = blob_alpha(rng, H, W, 3);
    smooth_image(fg.alpha, 1.5);
    fg.disparity_s = fg.disparity_t = delta;
    scene.layers = {bg, fg};
  } else {
    Layer bg;
    bg.texture = (kind == "gradient") ? gradient_texture(rng, H, W)
                                      : smooth_noise_texture(rng, H, W, 2.8);
    bg.disparity_s = bg.disparity_t = delta / 3.0;
    Layer fg;
    fg.texture = (kind == "gradient") ? gradient_texture(rng, H, W)
                                      : smooth_noise_texture(rng, H, W, 3.2);
    fg.alpha = blob_alpha(rng, H, W, 3);
    smooth_image(fg.alpha, 1.5);
    fg.disparity_s = fg.disparity_t = delta;
    scene.layers = {bg, fg};
  }
  BenchScene bs;
  bs.meta = {name, split, kind, sparse_disparity, dense_views, step};
  bs.dense = render_layered_lightfield(scene, dense_views, dense_views, H, W);
  bs.dense.clamp01();
  bs.sparse = downsample_angular(bs.dense, step);
  return bs;
}

}  // namespace detail

/// Deterministic scene suite for training, kernel selection and the oracle
/// tests. Smooth scenes sit in the Nyquist regime (d <= 1 between sparse
/// neighbors); band and texture scenes span disparities 1..4 px, inside the
/// 5 px limit of the plain pipeline; two train scenes carry 17 views per
/// axis, the rest 9.
inline std::vector<BenchScene> make_benchmark_suite(std::uint64_t seed) {
  GaussianRng rng(seed);
  const int H = 48, W = 64;
  std::vector<BenchScene> suite;
  int idx = 0;
  auto add = [&](const std::string& split, const std::string& kind, double d, int views) {
    char name[64];
    std::snprintf(name, sizeof(name), "scene_%02d_%s_d%g", idx++, kind.c_str(), d);
    suite.push_back(detail::make_scene(rng, name, split, kind, d, views, H, W));
  };
  for (double d : {0.5, 0.75}) {
    add("train", "gradient", d, 9);
    add("train", "smoothnoise", d, 9);
    add("test", "gradient", d, 9);
    add("test", "smoothnoise", d, 9);
  }
  for (double d : {1.0, 2.0, 3.0, 4.0}) {
    add("train", "bands", d, 9);
    add("train", "texture", d, 9);
    add("test", "bands", d, 9);
    add("test", "texture", d, 9);
  }
  add("train", "bands", 2.0, 17);    // exercise the 17x17 patch tiling
  add("train", "texture", 3.0, 17);
  return suite;
}

}  // namespace lfepi
