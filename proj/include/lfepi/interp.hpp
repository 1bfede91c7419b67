#pragma once

#include <algorithm>
#include <cmath>

#include "lfepi/epi.hpp"

namespace lfepi {

/// Catmull-Rom (Keys a = -0.5) weights for the four taps around a sample at
/// fractional offset t in [0,1). Exact at t = 0: (0,1,0,0).
struct CubicWeights {
  double w[4];
};

inline CubicWeights catmull_rom_weights(double t) {
  CubicWeights cw;
  cw.w[0] = ((-0.5 * t + 1.0) * t - 0.5) * t;
  cw.w[1] = (1.5 * t - 2.5) * t * t + 1.0;
  cw.w[2] = ((-1.5 * t + 2.0) * t + 0.5) * t;
  cw.w[3] = (0.5 * t - 0.5) * t * t;
  return cw;
}

/// Cubic sample of a row at fractional position p with replicate extension.
inline double sample_row_cubic(const double* row, int n, double p) {
  const double fp = std::floor(p);
  int i = static_cast<int>(fp);
  const double t = p - fp;
  if (t == 0.0) {
    // integer positions copy the sample bit-exactly
    return row[std::clamp(i, 0, n - 1)];
  }
  const CubicWeights cw = catmull_rom_weights(t);
  double acc = 0.0;
  for (int k = -1; k <= 2; ++k) {
    const int j = std::clamp(i + k, 0, n - 1);
    acc += cw.w[k + 1] * row[j];
  }
  return acc;
}

/// Cubic sample along the rows of a column-major walk (angular axis of an
/// EPI). End samples are extended by linear extrapolation so that signals
/// linear in the row index are reproduced exactly; see resample_angular.
inline double sample_column_cubic_extrap(const EPI& e, int x, double p) {
  const int n = e.n_views;
  const double fp = std::floor(p);
  int i = static_cast<int>(fp);
  const double t = p - fp;
  if (t == 0.0) {
    return e.at(std::clamp(i, 0, n - 1), x);
  }
  const CubicWeights cw = catmull_rom_weights(t);
  double acc = 0.0;
  for (int k = -1; k <= 2; ++k) {
    const int j = i + k;
    double v;
    if (j < 0) {
      v = 2.0 * e.at(0, x) - e.at(std::min(-j, n - 1), x);
    } else if (j >= n) {
      v = 2.0 * e.at(n - 1, x) - e.at(std::max(0, 2 * (n - 1) - j), x);
    } else {
      v = e.at(j, x);
    }
    acc += cw.w[k + 1] * v;
  }
  return acc;
}

/// Angular upsampling with align-corners sampling: output row j reads input
/// position j*(A-1)/(out_views-1), so the first and last input rows survive
/// verbatim and out_views == A is the identity.
inline EPI resample_angular(const EPI& epi, int out_views) {
  if (epi.n_views < 3)
    throw std::invalid_argument("resample_angular: need at least 3 views");
  if (out_views < epi.n_views)
    throw std::invalid_argument("resample_angular: out_views must be >= input views");
  EPI out(out_views, epi.width);
  out.max_disparity_px =
      epi.max_disparity_px * static_cast<double>(epi.n_views - 1) / static_cast<double>(out_views - 1);
  for (int j = 0; j < out_views; ++j) {
    // dividing last keeps integer sample positions exact
    const double p = static_cast<double>(j * (epi.n_views - 1)) / static_cast<double>(out_views - 1);
    for (int x = 0; x < epi.width; ++x) {
      out.at(j, x) = sample_column_cubic_extrap(epi, x, p);
    }
  }
  return out;
}

/// Shear about the central angular row: row a is translated by
/// -shear_px*(a - (A-1)/2) so content of uniform disparity shear_px becomes
/// vertical. Fractional shifts use the cubic interpolant with replicate
/// extension; integer shifts (including 0) are pure copies.
inline EPI shear_epi(const EPI& epi, double shear_px) {
  EPI out(epi.n_views, epi.width);
  out.max_disparity_px = epi.max_disparity_px;
  const double ac = epi.center_row();
  for (int a = 0; a < epi.n_views; ++a) {
    const double off = shear_px * (static_cast<double>(a) - ac);
    const double* src = epi.row(a);
    double* dst = out.row(a);
    const double r = std::round(off);
    if (off == r) {
      const int io = static_cast<int>(r);
      for (int x = 0; x < epi.width; ++x)
        dst[x] = src[std::clamp(x + io, 0, epi.width - 1)];
    } else {
      for (int x = 0; x < epi.width; ++x)
        dst[x] = sample_row_cubic(src, epi.width, static_cast<double>(x) + off);
    }
  }
  return out;
}

}  // namespace lfepi
