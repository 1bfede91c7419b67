#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lfepi/epi.hpp"

namespace lfepi {

enum class KernelKind { Sinc, Butterworth, Gaussian };

inline std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Sinc: return "sinc";
    case KernelKind::Butterworth: return "butterworth";
    case KernelKind::Gaussian: return "gaussian";
  }
  return "gaussian";
}

inline KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "sinc") return KernelKind::Sinc;
  if (s == "butterworth") return KernelKind::Butterworth;
  if (s == "gaussian") return KernelKind::Gaussian;
  throw std::invalid_argument("unknown kernel kind: " + s);
}

/// 1D spatial low-pass kernel, discretized at integer coordinates over the
/// window [-4*sigma, 4*sigma] and normalized to unit sum.
struct BlurKernel {
  KernelKind kind = KernelKind::Gaussian;
  double sigma = 1.5;
  double scale = 1.0;             // normalization constant applied to the raw taps
  std::vector<double> taps;       // odd length 2*ceil(4*sigma)+1, centered

  int half() const { return static_cast<int>(taps.size() / 2); }
};

/// Kernel shape-parameter rule anchored at the sigma = 1.5 / d_max = 4 pair.
inline double sigma_for_max_disparity(double d_max) { return 1.5 * d_max / 4.0; }

inline BlurKernel make_kernel(KernelKind kind, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("make_kernel: sigma must be positive");
  const int h = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> raw(2 * h + 1);
  // evaluate on k >= 0 and mirror, keeping the taps exactly symmetric
  for (int k = 0; k <= h; ++k) {
    const double x = static_cast<double>(k);
    double v = 0.0;
    switch (kind) {
      case KernelKind::Sinc: {
        const double t = x / (2.0 * sigma);
        v = (t == 0.0) ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
        break;
      }
      case KernelKind::Butterworth: {
        const double u = x / sigma;
        v = std::exp(-u) * (std::cos(u) + std::sin(u));
        break;
      }
      case KernelKind::Gaussian:
        v = std::exp(-x * x / (2.0 * sigma * sigma));
        break;
    }
    raw[h + k] = v;
    raw[h - k] = v;
  }
  double sum = 0.0;
  for (double v : raw) sum += v;
  BlurKernel kern;
  kern.kind = kind;
  kern.sigma = sigma;
  kern.scale = 1.0 / sum;
  kern.taps.resize(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) kern.taps[i] = raw[i] * kern.scale;
  return kern;
}

/// Convolves every angular row along x with the kernel taps, replicate
/// boundary. Output shape equals input shape.
inline EPI blur_epi(const EPI& epi, const BlurKernel& kernel) {
  EPI out(epi.n_views, epi.width);
  out.max_disparity_px = epi.max_disparity_px;
  const int h = kernel.half();
  const int w = epi.width;
  for (int a = 0; a < epi.n_views; ++a) {
    const double* src = epi.row(a);
    double* dst = out.row(a);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -h; k <= h; ++k) {
        const int j = std::clamp(x - k, 0, w - 1);
        acc += kernel.taps[h + k] * src[j];
      }
      dst[x] = acc;
    }
  }
  return out;
}

/// Kernel dump used by the test tooling: one tap per line, 17 significant digits.
inline std::string dump_kernel(const BlurKernel& k) {
  std::string s;
  char buf[64];
  for (double t : k.taps) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", t);
    s += buf;
  }
  return s;
}

}  // namespace lfepi
