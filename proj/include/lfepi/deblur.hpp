#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "lfepi/blur.hpp"
#include "lfepi/epi.hpp"
#include "lfepi/fft.hpp"

namespace lfepi {

/// Non-blind 1D deconvolution, per angular row:
///   X(w) = conj(K(w)) Y(w) / (|K(w)|^2 + reg_eps |G(w)|^2)
/// with G the first-difference filter (Tikhonov gradient prior). Rows are
/// replicate-extended to a power of two with at least a kernel-length margin
/// on each side, transformed, and cropped back. DC gain is exactly 1.
inline EPI deblur_epi(const EPI& epi, const BlurKernel& kernel, double reg_eps = 1e-3) {
  if (!(reg_eps > 0.0)) throw std::invalid_argument("deblur_epi: reg_eps must be positive");
  const int w = epi.width;
  const int margin = static_cast<int>(kernel.taps.size());
  const int n = next_power_of_two(w + 2 * margin);
  const int left = (n - w) / 2;

  // frequency response of the centered kernel and of the gradient prior
  std::vector<std::complex<double>> kf(n, 0.0);
  const int h = kernel.half();
  for (int k = -h; k <= h; ++k) kf[(k % n + n) % n] = kernel.taps[h + k];
  fft_inplace(kf, false);
  std::vector<double> denom(n);
  for (int j = 0; j < n; ++j) {
    const double g2 = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * j / n);
    denom[j] = std::norm(kf[j]) + reg_eps * g2;
  }

  EPI out(epi.n_views, epi.width);
  out.max_disparity_px = epi.max_disparity_px;
  std::vector<std::complex<double>> row(n);
  for (int a = 0; a < epi.n_views; ++a) {
    const double* src = epi.row(a);
    for (int i = 0; i < n; ++i) {
      const int x = std::clamp(i - left, 0, w - 1);
      row[i] = src[x];
    }
    fft_inplace(row, false);
    for (int j = 0; j < n; ++j) row[j] = std::conj(kf[j]) * row[j] / denom[j];
    fft_inplace(row, true);
    double* dst = out.row(a);
    for (int x = 0; x < w; ++x) dst[x] = row[left + x].real();
  }
  return out;
}

}  // namespace lfepi
