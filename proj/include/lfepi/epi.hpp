#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lfepi {

/// Dense 2D scalar grid, row-major. Backs view planes, disparity maps,
/// spectra and metric inputs.
struct Image2D {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Image2D() = default;
  Image2D(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {
    if (r < 0 || c < 0) throw std::invalid_argument("Image2D: negative dimensions");
  }

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

  size_t size() const { return data.size(); }

  bool same_shape(const Image2D& o) const { return rows == o.rows && cols == o.cols; }
};

/// Epipolar plane image: rows are views (angular axis), columns are pixels
/// along one spatial axis. max_disparity_px is carried as metadata only.
struct EPI {
  int n_views = 0;
  int width = 0;
  double max_disparity_px = 0.0;
  std::vector<double> pix;  // (n_views x width), row-major

  EPI() = default;
  EPI(int views, int w, double fill = 0.0)
      : n_views(views), width(w),
        pix(static_cast<size_t>(views) * static_cast<size_t>(w), fill) {
    if (views < 1 || w < 1) throw std::invalid_argument("EPI: dimensions must be >= 1");
  }

  double& at(int a, int x) { return pix[static_cast<size_t>(a) * width + x]; }
  double at(int a, int x) const { return pix[static_cast<size_t>(a) * width + x]; }

  double* row(int a) { return pix.data() + static_cast<size_t>(a) * width; }
  const double* row(int a) const { return pix.data() + static_cast<size_t>(a) * width; }

  /// Angular pivot used by shear and the synthetic generators.
  double center_row() const { return 0.5 * (n_views - 1); }
};

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double mse_between(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("mse: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return a.empty() ? 0.0 : s / static_cast<double>(a.size());
}

}  // namespace lfepi
