#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "lfepi/epi.hpp"
#include "lfepi/fft.hpp"
#include "lfepi/netpbm.hpp"

namespace lfepi {

/// DC-centered log-power grid of an EPI transform; axes are in
/// cycles/sample, bin k maps to (k - pad/2) / pad.
struct Spectrum {
  Image2D log_power;  // (pad x pad)

  double freq_of_bin(int k) const {
    return (static_cast<double>(k) - 0.5 * log_power.rows) / log_power.rows;
  }
};

namespace detail {

/// Mean-subtracted zero-padded 2D transform; returns linear power, DC at (0,0).
inline std::vector<double> linear_power_grid(const EPI& epi, int pad) {
  std::vector<std::complex<double>> grid(static_cast<size_t>(pad) * pad, 0.0);
  const double mean = mean_of(epi.pix);
  for (int a = 0; a < epi.n_views; ++a)
    for (int x = 0; x < epi.width; ++x)
      grid[static_cast<size_t>(a) * pad + x] = epi.at(a, x) - mean;
  fft2_inplace(grid, pad, pad, false);
  std::vector<double> power(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) power[i] = std::norm(grid[i]);
  return power;
}

}  // namespace detail

/// log10(power + 1e-12) of the mean-subtracted, zero-padded EPI transform.
inline Spectrum epi_power_spectrum(const EPI& epi, int pad) {
  if (!is_power_of_two(pad) || pad < std::max(epi.n_views, epi.width))
    throw std::invalid_argument("epi_power_spectrum: pad must be a power of two >= max(A, W)");
  const std::vector<double> power = detail::linear_power_grid(epi, pad);
  Spectrum spec;
  spec.log_power = Image2D(pad, pad);
  const int half = pad / 2;
  for (int ky = 0; ky < pad; ++ky) {
    for (int kx = 0; kx < pad; ++kx) {
      // fftshift: centered bin (ky,kx) reads unshifted ((ky+half)%pad, ...)
      const int sy = (ky + half) % pad;
      const int sx = (kx + half) % pad;
      spec.log_power.at(ky, kx) = std::log10(power[static_cast<size_t>(sy) * pad + sx] + 1e-12);
    }
  }
  return spec;
}

/// Fraction of linear spectral power at |spatial frequency| > cutoff
/// (cycles/sample), summed over all angular frequencies. Always in [0,1];
/// an EPI with no AC energy returns 0.
inline double highband_energy_ratio(const EPI& epi, double cutoff) {
  if (!(cutoff > 0.0 && cutoff < 0.5))
    throw std::invalid_argument("highband_energy_ratio: cutoff must be in (0, 0.5)");
  const int pad = next_power_of_two(std::max(epi.n_views, epi.width));
  const std::vector<double> power = detail::linear_power_grid(epi, pad);
  double total = 0.0, high = 0.0;
  for (int ky = 0; ky < pad; ++ky) {
    for (int kx = 0; kx < pad; ++kx) {
      const double p = power[static_cast<size_t>(ky) * pad + kx];
      const double fx = (kx <= pad / 2 ? kx : kx - pad) / static_cast<double>(pad);
      total += p;
      if (std::abs(fx) > cutoff) high += p;
    }
  }
  if (total <= 0.0) return 0.0;
  return high / total;
}

/// Writes <prefix>.pgm (16-bit, min->0, max->65535) and <prefix>.csv
/// (header ky,kx,log_power) for a spectrum grid.
inline void export_spectrum(const Spectrum& spec, const std::filesystem::path& prefix) {
  const Image2D& lp = spec.log_power;
  double lo = lp.data[0], hi = lp.data[0];
  for (double v : lp.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::vector<double> scaled(lp.data.size());
  for (size_t i = 0; i < lp.data.size(); ++i) scaled[i] = (lp.data[i] - lo) / span;
  auto pgm = prefix;
  pgm += ".pgm";
  write_pnm(pgm, lp.rows, lp.cols, 1, 65535, scaled);

  auto csvp = prefix;
  csvp += ".csv";
  std::ofstream csv(csvp, std::ios::trunc);
  if (!csv) throw std::runtime_error("export_spectrum: cannot write " + csvp.string());
  csv << "ky,kx,log_power\n";
  char buf[96];
  for (int ky = 0; ky < lp.rows; ++ky)
    for (int kx = 0; kx < lp.cols; ++kx) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.10g\n", ky, kx, lp.at(ky, kx));
      csv << buf;
    }
}

}  // namespace lfepi
