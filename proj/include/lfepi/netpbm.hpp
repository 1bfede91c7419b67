#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lfepi {

/// Raw Netpbm raster: interleaved samples scaled to [0,1] on read.
struct PnmImage {
  int height = 0;
  int width = 0;
  int channels = 1;   // 1 = PGM (P5), 3 = PPM (P6)
  int maxval = 65535; // 255 or 65535
  std::vector<double> samples;  // (y, x, c) in [0,1]

  double at(int y, int x, int c) const {
    return samples[(static_cast<size_t>(y) * width + x) * channels + c];
  }
};

namespace detail {

inline int pnm_next_token(std::istream& in, std::string& tok) {
  tok.clear();
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {}
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return 0;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok.empty() ? -1 : 0;
}

inline int pnm_read_int(std::istream& in, const std::string& what) {
  std::string tok;
  if (pnm_next_token(in, tok) != 0)
    throw std::runtime_error("netpbm: missing " + what);
  try {
    return std::stoi(tok);
  } catch (...) {
    throw std::runtime_error("netpbm: malformed " + what + " '" + tok + "'");
  }
}

}  // namespace detail

inline PnmImage read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("netpbm: cannot open " + path.string());
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || (m1 != '5' && m1 != '6'))
    throw std::runtime_error("netpbm: unsupported magic in " + path.string());
  PnmImage img;
  img.channels = (m1 == '6') ? 3 : 1;
  img.width = detail::pnm_read_int(in, "width");
  img.height = detail::pnm_read_int(in, "height");
  img.maxval = detail::pnm_read_int(in, "maxval");
  if (img.width < 1 || img.height < 1 || img.maxval < 1 || img.maxval > 65535)
    throw std::runtime_error("netpbm: bad header in " + path.string());
  // header ends with exactly one whitespace byte (already consumed by tokenizer)
  const size_t n = static_cast<size_t>(img.width) * img.height * img.channels;
  const bool wide = img.maxval > 255;
  std::vector<unsigned char> raw(n * (wide ? 2 : 1));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<size_t>(in.gcount()) != raw.size())
    throw std::runtime_error("netpbm: truncated raster in " + path.string());
  img.samples.resize(n);
  const double inv = 1.0 / static_cast<double>(img.maxval);
  if (wide) {
    for (size_t i = 0; i < n; ++i) {
      const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
      img.samples[i] = std::min(1.0, static_cast<double>(v) * inv);
    }
  } else {
    for (size_t i = 0; i < n; ++i)
      img.samples[i] = std::min(1.0, static_cast<double>(raw[i]) * inv);
  }
  return img;
}

/// Writes P5/P6 with 16-bit samples stored big-endian per Netpbm convention.
/// Values are clamped to [0,1] and quantized by rounding.
inline void write_pnm(const std::filesystem::path& path, int height, int width,
                      int channels, int maxval, const std::vector<double>& samples) {
  if (channels != 1 && channels != 3)
    throw std::invalid_argument("netpbm: channels must be 1 or 3");
  if (maxval != 255 && maxval != 65535)
    throw std::invalid_argument("netpbm: maxval must be 255 or 65535");
  if (samples.size() != static_cast<size_t>(height) * width * channels)
    throw std::invalid_argument("netpbm: sample count mismatch");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("netpbm: cannot write " + path.string());
  out << (channels == 3 ? "P6" : "P5") << "\n"
      << width << " " << height << "\n"
      << maxval << "\n";
  const bool wide = maxval > 255;
  std::vector<unsigned char> raw;
  raw.reserve(samples.size() * (wide ? 2 : 1));
  for (double v : samples) {
    const double c = std::clamp(v, 0.0, 1.0);
    const unsigned q = static_cast<unsigned>(std::lround(c * maxval));
    if (wide) {
      raw.push_back(static_cast<unsigned char>((q >> 8) & 0xFF));
      raw.push_back(static_cast<unsigned char>(q & 0xFF));
    } else {
      raw.push_back(static_cast<unsigned char>(q & 0xFF));
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw std::runtime_error("netpbm: write failed for " + path.string());
}

}  // namespace lfepi
