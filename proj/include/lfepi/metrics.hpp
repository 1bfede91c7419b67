#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lfepi/epi.hpp"
#include "lfepi/light_field.hpp"

namespace lfepi {

/// 10*log10(peak^2 / MSE); identical images return +infinity.
inline double psnr(const Image2D& a, const Image2D& b, double peak = 1.0) {
  if (!a.same_shape(b)) throw std::invalid_argument("psnr: shape mismatch");
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive");
  const double mse = mse_between(a.data, b.data);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

namespace detail {

inline std::vector<double> ssim_window() {
  // 11x11 Gaussian, sigma 1.5, normalized
  std::vector<double> w1(11);
  double sum = 0.0;
  for (int i = 0; i < 11; ++i) {
    const double d = i - 5.0;
    w1[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    sum += w1[i];
  }
  for (double& v : w1) v /= sum;
  return w1;
}

/// Valid-region separable filtering with the 11-tap window.
inline Image2D ssim_filter(const Image2D& img, const std::vector<double>& w1) {
  const int k = 11, h = img.rows, w = img.cols;
  Image2D tmp(h, w - k + 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x + k <= w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += w1[i] * img.at(y, x + i);
      tmp.at(y, x) = acc;
    }
  Image2D out(h - k + 1, w - k + 1);
  for (int y = 0; y + k <= h; ++y)
    for (int x = 0; x < tmp.cols; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += w1[i] * tmp.at(y + i, x);
      out.at(y, x) = acc;
    }
  return out;
}

inline Image2D downsample2(const Image2D& img) {
  Image2D out(img.rows / 2, img.cols / 2);
  for (int y = 0; y < out.rows; ++y)
    for (int x = 0; x < out.cols; ++x)
      out.at(y, x) = 0.25 * (img.at(2 * y, 2 * x) + img.at(2 * y, 2 * x + 1) +
                             img.at(2 * y + 1, 2 * x) + img.at(2 * y + 1, 2 * x + 1));
  return out;
}

struct SsimScale {
  double mean_cs = 0.0;    // contrast*structure term
  double mean_ssim = 0.0;  // full SSIM (luminance included)
};

inline SsimScale ssim_scale(const Image2D& a, const Image2D& b, const std::vector<double>& w1) {
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;  // K1/K2 on unit dynamic range
  Image2D aa(a.rows, a.cols), bb(a.rows, a.cols), ab(a.rows, a.cols);
  for (size_t i = 0; i < a.data.size(); ++i) {
    aa.data[i] = a.data[i] * a.data[i];
    bb.data[i] = b.data[i] * b.data[i];
    ab.data[i] = a.data[i] * b.data[i];
  }
  const Image2D mu1 = ssim_filter(a, w1), mu2 = ssim_filter(b, w1);
  const Image2D m11 = ssim_filter(aa, w1), m22 = ssim_filter(bb, w1), m12 = ssim_filter(ab, w1);
  SsimScale r;
  const size_t n = mu1.data.size();
  for (size_t i = 0; i < n; ++i) {
    const double u1 = mu1.data[i], u2 = mu2.data[i];
    const double s1 = m11.data[i] - u1 * u1;
    const double s2 = m22.data[i] - u2 * u2;
    const double s12 = m12.data[i] - u1 * u2;
    const double cs = (2.0 * s12 + c2) / (s1 + s2 + c2);
    const double l = (2.0 * u1 * u2 + c1) / (u1 * u1 + u2 * u2 + c1);
    r.mean_cs += cs;
    r.mean_ssim += l * cs;
  }
  r.mean_cs /= static_cast<double>(n);
  r.mean_ssim /= static_cast<double>(n);
  return r;
}

}  // namespace detail

/// 5-scale MS-SSIM (11x11 Gaussian window sigma 1.5, K1=0.01, K2=0.03,
/// weights 0.0448/0.2856/0.3001/0.2363/0.1333, dyadic mean-pool
/// downsampling). Images too small for five scales use fewer scales with
/// renormalized weights; identical inputs give exactly 1.
inline double ms_ssim(const Image2D& a, const Image2D& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("ms_ssim: shape mismatch");
  static const double kWeights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  int scales = 0;
  {
    int dim = std::min(a.rows, a.cols);
    while (scales < 5 && dim >= 11) {
      ++scales;
      dim /= 2;
    }
  }
  if (scales == 0) throw std::invalid_argument("ms_ssim: image smaller than the 11x11 window");
  double wsum = 0.0;
  for (int j = 0; j < scales; ++j) wsum += kWeights[j];

  const std::vector<double> w1 = detail::ssim_window();
  Image2D ca = a, cb = b;
  double acc = 1.0;
  for (int j = 0; j < scales; ++j) {
    const detail::SsimScale s = detail::ssim_scale(ca, cb, w1);
    const double wj = kWeights[j] / wsum;
    if (j + 1 < scales) {
      acc *= std::pow(s.mean_cs, wj);
      ca = detail::downsample2(ca);
      cb = detail::downsample2(cb);
    } else {
      acc *= std::pow(s.mean_ssim, wj);
    }
  }
  return acc;
}

/// Luma plane of one view; RGB views are converted with the BT.601 weights.
inline Image2D view_luma(const LightField4D& lf, int t, int s) {
  Image2D img(lf.H, lf.W);
  if (lf.C == 1 || lf.space == ChannelSpace::YCbCr) {
    for (int y = 0; y < lf.H; ++y)
      for (int x = 0; x < lf.W; ++x) img.at(y, x) = lf.at(t, s, y, x, 0);
  } else {
    for (int y = 0; y < lf.H; ++y)
      for (int x = 0; x < lf.W; ++x)
        img.at(y, x) = 0.299 * lf.at(t, s, y, x, 0) + 0.587 * lf.at(t, s, y, x, 1) +
                       0.114 * lf.at(t, s, y, x, 2);
  }
  return img;
}

struct ViewMetrics {
  int t = 0, s = 0;
  double psnr_db = 0.0;
  double ms_ssim = 0.0;
};

struct MetricReport {
  std::vector<ViewMetrics> views;

  /// Mean over views for which `novel(t,s)` holds; infinities are skipped
  /// (they would otherwise dominate the aggregate).
  template <typename Pred>
  std::pair<double, double> mean_where(Pred novel) const {
    double ps = 0.0, ss = 0.0;
    int n = 0;
    for (const auto& v : views) {
      if (!novel(v.t, v.s)) continue;
      if (!std::isfinite(v.psnr_db)) continue;
      ps += v.psnr_db;
      ss += v.ms_ssim;
      ++n;
    }
    if (n == 0) return {0.0, 0.0};
    return {ps / n, ss / n};
  }
};

/// Per-view Y-channel metrics of a reconstruction against ground truth.
inline MetricReport evaluate_lightfield(const LightField4D& recon, const LightField4D& truth) {
  if (recon.T != truth.T || recon.S != truth.S || recon.H != truth.H || recon.W != truth.W)
    throw std::invalid_argument("evaluate_lightfield: dimension mismatch");
  MetricReport rep;
  for (int t = 0; t < recon.T; ++t) {
    for (int s = 0; s < recon.S; ++s) {
      const Image2D a = view_luma(recon, t, s);
      const Image2D b = view_luma(truth, t, s);
      ViewMetrics m;
      m.t = t;
      m.s = s;
      m.psnr_db = psnr(a, b, 1.0);
      m.ms_ssim = ms_ssim(a, b);
      rep.views.push_back(m);
    }
  }
  return rep;
}

inline void write_metric_report(const MetricReport& rep, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("metrics: cannot write " + path.string());
  out << "view_t,view_s,psnr_db,ms_ssim\n";
  char buf[128];
  for (const auto& v : rep.views) {
    if (std::isfinite(v.psnr_db))
      std::snprintf(buf, sizeof(buf), "%d,%d,%.9f,%.9f\n", v.t, v.s, v.psnr_db, v.ms_ssim);
    else
      std::snprintf(buf, sizeof(buf), "%d,%d,inf,%.9f\n", v.t, v.s, v.ms_ssim);
    out << buf;
  }
}

}  // namespace lfepi
