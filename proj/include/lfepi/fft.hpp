#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace lfepi {

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline int next_power_of_two(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Iterative radix-2 FFT, in place. Inverse transform scales by 1/N. All
/// transform sizes in this library are powers of two by construction, so a
/// general mixed-radix dependency is unnecessary.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const int n = static_cast<int>(a.size());
  if (!is_power_of_two(n)) throw std::invalid_argument("fft: size must be a power of two");
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / len * (inverse ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (int k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / n;
    for (auto& x : a) x *= inv;
  }
}

/// 2D FFT of a rows x cols grid (both powers of two), row-major.
inline void fft2_inplace(std::vector<std::complex<double>>& grid, int rows, int cols,
                         bool inverse) {
  if (static_cast<size_t>(rows) * cols != grid.size())
    throw std::invalid_argument("fft2: grid size mismatch");
  std::vector<std::complex<double>> line;
  line.resize(cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) line[c] = grid[static_cast<size_t>(r) * cols + c];
    fft_inplace(line, inverse);
    for (int c = 0; c < cols; ++c) grid[static_cast<size_t>(r) * cols + c] = line[c];
  }
  line.resize(rows);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) line[r] = grid[static_cast<size_t>(r) * cols + c];
    fft_inplace(line, inverse);
    for (int r = 0; r < rows; ++r) grid[static_cast<size_t>(r) * cols + c] = line[r];
  }
}

}  // namespace lfepi
