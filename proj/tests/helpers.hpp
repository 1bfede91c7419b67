#pragma once

// Shared test utilities and the independent reference implementations used
// as oracles. Everything here is deliberately written as plain direct code,
// separate from the library's optimized paths.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "lfepi/lfepi.hpp"

namespace testutil {

using lfepi::EPI;
using lfepi::Image2D;

inline double psnr_interior(const EPI& a, const EPI& b, int margin) {
  double se = 0.0;
  long n = 0;
  for (int r = 0; r < a.n_views; ++r)
    for (int x = margin; x < a.width - margin; ++x) {
      const double d = a.at(r, x) - b.at(r, x);
      se += d * d;
      ++n;
    }
  const double mse = se / n;
  return mse == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(1.0 / mse);
}

// Direct O(W*K) reference convolution with replicate boundary.
inline EPI reference_blur(const EPI& epi, const std::vector<double>& taps) {
  const int h = static_cast<int>(taps.size() / 2);
  EPI out(epi.n_views, epi.width);
  for (int a = 0; a < epi.n_views; ++a)
    for (int x = 0; x < epi.width; ++x) {
      double acc = 0.0;
      for (int k = -h; k <= h; ++k) {
        int j = x - k;
        if (j < 0) j = 0;
        if (j >= epi.width) j = epi.width - 1;
        acc += taps[h + k] * epi.at(a, j);
      }
      out.at(a, x) = acc;
    }
  return out;
}

// Brute-force DFT for FFT verification.
inline std::vector<std::complex<double>> reference_dft(const std::vector<std::complex<double>>& x,
                                                       bool inverse) {
  const size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  const double sgn = inverse ? 1.0 : -1.0;
  for (size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (size_t j = 0; j < n; ++j) {
      const double ang = sgn * 2.0 * M_PI * static_cast<double>(j * k % n) / n;
      acc += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = inverse ? acc / static_cast<double>(n) : acc;
  }
  return out;
}

// Direct zero-padded SAME convolution chain reproducing the network forward
// pass with nested loops (the brute-force oracle for the optimized path).
inline Image2D reference_forward(const lfepi::Network& net, const Image2D& in) {
  const int H = in.rows, W = in.cols;
  auto conv = [&](const std::vector<Image2D>& planes, const lfepi::ConvLayer& L) {
    std::vector<Image2D> out(L.out_ch, Image2D(H, W));
    const int ph = L.kh / 2, pw = L.kw / 2;
    for (int oc = 0; oc < L.out_ch; ++oc)
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
          double acc = L.b[oc];
          for (int ic = 0; ic < L.in_ch; ++ic)
            for (int ky = 0; ky < L.kh; ++ky)
              for (int kx = 0; kx < L.kw; ++kx) {
                const int sy = y + ky - ph, sx = x + kx - pw;
                if (sy < 0 || sy >= H || sx < 0 || sx >= W) continue;  // zero pad
                acc += L.w[L.widx(oc, ic, ky, kx)] * planes[ic].at(sy, sx);
              }
          out[oc].at(y, x) = acc;
        }
    return out;
  };
  auto relu = [](std::vector<Image2D>& planes) {
    for (auto& p : planes)
      for (double& v : p.data) v = v > 0.0 ? v : 0.0;
  };
  std::vector<Image2D> a = {in};
  a = conv(a, net.l1);
  relu(a);
  a = conv(a, net.l2);
  relu(a);
  a = conv(a, net.l3);
  return a[0];
}

// Straightforward PSNR (the reference for the metrics module).
inline double reference_psnr(const Image2D& a, const Image2D& b, double peak) {
  double se = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

// Independent MS-SSIM translation: 11x11 sigma-1.5 Gaussian window, valid
// region, K1=0.01/K2=0.03, weights from the original metric, 2x2 mean-pool
// pyramid, luminance folded in at the coarsest scale.
inline double reference_ms_ssim(const Image2D& img_a, const Image2D& img_b) {
  const double kW[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  double win[11][11];
  double wsum = 0.0;
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) {
      const double dy = i - 5.0, dx = j - 5.0;
      win[i][j] = std::exp(-(dy * dy + dx * dx) / (2.0 * 2.25));
      wsum += win[i][j];
    }
  for (auto& row : win)
    for (double& v : row) v /= wsum;

  int scales = 0;
  for (int dim = std::min(img_a.rows, img_a.cols); scales < 5 && dim >= 11; dim /= 2) ++scales;
  if (scales == 0) return std::nan("");
  double weight_total = 0.0;
  for (int j = 0; j < scales; ++j) weight_total += kW[j];

  Image2D a = img_a, b = img_b;
  double result = 1.0;
  for (int sc = 0; sc < scales; ++sc) {
    double mean_cs = 0.0, mean_ssim = 0.0;
    long count = 0;
    for (int y = 0; y + 11 <= a.rows; ++y)
      for (int x = 0; x + 11 <= a.cols; ++x) {
        double m1 = 0, m2 = 0, m11 = 0, m22 = 0, m12 = 0;
        for (int i = 0; i < 11; ++i)
          for (int j = 0; j < 11; ++j) {
            const double va = a.at(y + i, x + j), vb = b.at(y + i, x + j);
            m1 += win[i][j] * va;
            m2 += win[i][j] * vb;
            m11 += win[i][j] * va * va;
            m22 += win[i][j] * vb * vb;
            m12 += win[i][j] * va * vb;
          }
        const double c1 = 1e-4, c2 = 9e-4;
        const double s1 = m11 - m1 * m1, s2 = m22 - m2 * m2, s12 = m12 - m1 * m2;
        const double cs = (2 * s12 + c2) / (s1 + s2 + c2);
        const double l = (2 * m1 * m2 + c1) / (m1 * m1 + m2 * m2 + c1);
        mean_cs += cs;
        mean_ssim += l * cs;
        ++count;
      }
    mean_cs /= count;
    mean_ssim /= count;
    const double w = kW[sc] / weight_total;
    result *= std::pow(sc + 1 < scales ? mean_cs : mean_ssim, w);
    if (sc + 1 < scales) {
      Image2D a2(a.rows / 2, a.cols / 2), b2(a.rows / 2, a.cols / 2);
      for (int y = 0; y < a2.rows; ++y)
        for (int x = 0; x < a2.cols; ++x) {
          a2.at(y, x) = 0.25 * (a.at(2 * y, 2 * x) + a.at(2 * y, 2 * x + 1) +
                                a.at(2 * y + 1, 2 * x) + a.at(2 * y + 1, 2 * x + 1));
          b2.at(y, x) = 0.25 * (b.at(2 * y, 2 * x) + b.at(2 * y, 2 * x + 1) +
                                b.at(2 * y + 1, 2 * x) + b.at(2 * y + 1, 2 * x + 1));
        }
      a = std::move(a2);
      b = std::move(b2);
    }
  }
  return result;
}

// RAII scratch directory under the system temp root.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 10000; ++i) {
      auto p = base / ("lfepi_test_" + tag + "_" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(p, ec)) {
        path_ = p;
        return;
      }
    }
    throw std::runtime_error("cannot create scratch dir");
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// The deterministic suite is expensive enough to share per test binary.
inline const std::vector<lfepi::BenchScene>& shared_suite() {
  static const std::vector<lfepi::BenchScene> suite = lfepi::make_benchmark_suite(7);
  return suite;
}

inline bool files_equal(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::vector<char> ba((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  std::vector<char> bb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  return ba == bb;
}

inline bool dirs_equal(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::vector<std::filesystem::path> fa, fb;
  for (auto& e : std::filesystem::recursive_directory_iterator(a))
    if (e.is_regular_file()) fa.push_back(std::filesystem::relative(e.path(), a));
  for (auto& e : std::filesystem::recursive_directory_iterator(b))
    if (e.is_regular_file()) fb.push_back(std::filesystem::relative(e.path(), b));
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) return false;
  for (auto& rel : fa)
    if (!files_equal(a / rel, b / rel)) return false;
  return true;
}

}  // namespace testutil
