#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfepi/epi.hpp"

namespace lfepi {

enum class ChannelSpace { RGB, YCbCr, Luma };

inline std::string to_string(ChannelSpace s) {
  switch (s) {
    case ChannelSpace::RGB: return "RGB";
    case ChannelSpace::YCbCr: return "YCBCR";
    case ChannelSpace::Luma: return "LUMA";
  }
  return "LUMA";
}

inline ChannelSpace channel_space_from_string(const std::string& s) {
  if (s == "RGB") return ChannelSpace::RGB;
  if (s == "YCBCR") return ChannelSpace::YCbCr;
  if (s == "LUMA") return ChannelSpace::Luma;
  throw std::runtime_error("unknown channel_space tag: " + s);
}

/// 4D light field L(x,y,s,t) with per-view color planes. Samples are stored
/// row-major as (t, s, y, x, c) and live in [0,1] once loaded.
struct LightField4D {
  int T = 0, S = 0, H = 0, W = 0, C = 1;
  ChannelSpace space = ChannelSpace::Luma;
  std::vector<double> data;

  LightField4D() = default;
  LightField4D(int t, int s, int h, int w, int c,
               ChannelSpace sp = ChannelSpace::Luma, double fill = 0.0)
      : T(t), S(s), H(h), W(w), C(c), space(sp),
        data(static_cast<size_t>(t) * s * h * w * c, fill) {
    if (t < 1 || s < 1 || h < 1 || w < 1 || (c != 1 && c != 3))
      throw std::invalid_argument("LightField4D: bad dimensions");
  }

  size_t idx(int t, int s, int y, int x, int c) const {
    return (((static_cast<size_t>(t) * S + s) * H + y) * W + x) * C + c;
  }
  double& at(int t, int s, int y, int x, int c) { return data[idx(t, s, y, x, c)]; }
  double at(int t, int s, int y, int x, int c) const { return data[idx(t, s, y, x, c)]; }

  Image2D view_plane(int t, int s, int c) const {
    Image2D img(H, W);
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) img.at(y, x) = at(t, s, y, x, c);
    return img;
  }

  void clamp01() {
    for (double& v : data) v = std::clamp(v, 0.0, 1.0);
  }
};

enum class EpiOrientation { Horizontal, Vertical };

/// Horizontal: fixes (y*, t*), rows of the EPI run over s, columns over x.
/// Vertical: fixes (x*, s*), rows run over t, columns over y.
inline EPI extract_epi(const LightField4D& lf, EpiOrientation o, int fixed_spatial,
                       int fixed_angular, int channel) {
  if (channel < 0 || channel >= lf.C)
    throw std::invalid_argument("extract_epi: channel out of range");
  if (o == EpiOrientation::Horizontal) {
    if (fixed_spatial < 0 || fixed_spatial >= lf.H)
      throw std::invalid_argument("extract_epi: y* out of range");
    if (fixed_angular < 0 || fixed_angular >= lf.T)
      throw std::invalid_argument("extract_epi: t* out of range");
    EPI e(lf.S, lf.W);
    for (int s = 0; s < lf.S; ++s)
      for (int x = 0; x < lf.W; ++x)
        e.at(s, x) = lf.at(fixed_angular, s, fixed_spatial, x, channel);
    return e;
  }
  if (fixed_spatial < 0 || fixed_spatial >= lf.W)
    throw std::invalid_argument("extract_epi: x* out of range");
  if (fixed_angular < 0 || fixed_angular >= lf.S)
    throw std::invalid_argument("extract_epi: s* out of range");
  EPI e(lf.T, lf.H);
  for (int t = 0; t < lf.T; ++t)
    for (int y = 0; y < lf.H; ++y)
      e.at(t, y) = lf.at(t, fixed_angular, y, fixed_spatial, channel);
  return e;
}

inline void insert_epi(LightField4D& lf, const EPI& epi, EpiOrientation o,
                       int fixed_spatial, int fixed_angular, int channel) {
  if (channel < 0 || channel >= lf.C)
    throw std::invalid_argument("insert_epi: channel out of range");
  if (o == EpiOrientation::Horizontal) {
    if (epi.n_views != lf.S || epi.width != lf.W)
      throw std::invalid_argument("insert_epi: shape mismatch");
    for (int s = 0; s < lf.S; ++s)
      for (int x = 0; x < lf.W; ++x)
        lf.at(fixed_angular, s, fixed_spatial, x, channel) = epi.at(s, x);
    return;
  }
  if (epi.n_views != lf.T || epi.width != lf.H)
    throw std::invalid_argument("insert_epi: shape mismatch");
  for (int t = 0; t < lf.T; ++t)
    for (int y = 0; y < lf.H; ++y)
      lf.at(t, fixed_angular, y, fixed_spatial, channel) = epi.at(t, y);
}

enum class ColorDirection { RgbToYCbCr, YCbCrToRgb };

/// BT.601 full-range conversion. Round trips are exact up to floating-point
/// rounding, well inside the 1/255 contract.
inline LightField4D convert_color(const LightField4D& lf, ColorDirection dir) {
  if (lf.C != 3) throw std::invalid_argument("convert_color: requires 3 channels");
  LightField4D out = lf;
  if (dir == ColorDirection::RgbToYCbCr) {
    if (lf.space != ChannelSpace::RGB)
      throw std::invalid_argument("convert_color: source is not RGB");
    out.space = ChannelSpace::YCbCr;
    for (size_t i = 0; i < lf.data.size(); i += 3) {
      const double r = lf.data[i], g = lf.data[i + 1], b = lf.data[i + 2];
      const double y = 0.299 * r + 0.587 * g + 0.114 * b;
      out.data[i] = y;
      out.data[i + 1] = 0.5 + (b - y) / 1.772;
      out.data[i + 2] = 0.5 + (r - y) / 1.402;
    }
  } else {
    if (lf.space != ChannelSpace::YCbCr)
      throw std::invalid_argument("convert_color: source is not YCbCr");
    out.space = ChannelSpace::RGB;
    for (size_t i = 0; i < lf.data.size(); i += 3) {
      const double y = lf.data[i], cb = lf.data[i + 1], cr = lf.data[i + 2];
      const double r = y + 1.402 * (cr - 0.5);
      const double b = y + 1.772 * (cb - 0.5);
      const double g = (y - 0.299 * r - 0.114 * b) / 0.587;
      out.data[i] = r;
      out.data[i + 1] = g;
      out.data[i + 2] = b;
    }
  }
  return out;
}

/// Keeps views at angular indices {0, step, 2*step, ...} on both axes.
/// Requires (S-1) and (T-1) divisible by step so the corner views survive.
inline LightField4D downsample_angular(const LightField4D& lf, int step) {
  if (step < 1) throw std::invalid_argument("downsample_angular: step must be >= 1");
  if ((lf.S - 1) % step != 0 || (lf.T - 1) % step != 0)
    throw std::invalid_argument("downsample_angular: (S-1) and (T-1) must be divisible by step");
  const int S2 = (lf.S - 1) / step + 1;
  const int T2 = (lf.T - 1) / step + 1;
  LightField4D out(T2, S2, lf.H, lf.W, lf.C, lf.space);
  for (int t = 0; t < T2; ++t)
    for (int s = 0; s < S2; ++s)
      for (int y = 0; y < lf.H; ++y)
        for (int x = 0; x < lf.W; ++x)
          for (int c = 0; c < lf.C; ++c)
            out.at(t, s, y, x, c) = lf.at(t * step, s * step, y, x, c);
  return out;
}

/// 2x2 mean pooling of the spatial axes (used by training augmentation).
inline LightField4D downsample_spatial_2x(const LightField4D& lf) {
  const int H2 = lf.H / 2, W2 = lf.W / 2;
  if (H2 < 1 || W2 < 1)
    throw std::invalid_argument("downsample_spatial_2x: image too small");
  LightField4D out(lf.T, lf.S, H2, W2, lf.C, lf.space);
  for (int t = 0; t < lf.T; ++t)
    for (int s = 0; s < lf.S; ++s)
      for (int y = 0; y < H2; ++y)
        for (int x = 0; x < W2; ++x)
          for (int c = 0; c < lf.C; ++c)
            out.at(t, s, y, x, c) =
                0.25 * (lf.at(t, s, 2 * y, 2 * x, c) + lf.at(t, s, 2 * y, 2 * x + 1, c) +
                        lf.at(t, s, 2 * y + 1, 2 * x, c) + lf.at(t, s, 2 * y + 1, 2 * x + 1, c));
  return out;
}

/// Role of each (t,s) position in the hierarchical reconstruction.
enum class ViewRole : unsigned char { Input, Step1H, Step1V, Step2 };

/// Maps the sparse input lattice onto the output grid. Requires the output
/// extents to be aligned multiples of the input extents so every input view
/// lands on an integer output position.
struct ViewGrid {
  int t_out = 0, s_out = 0;
  int t_step = 0, s_step = 0;  // lattice spacing of input views on the output grid
  std::vector<ViewRole> roles;  // (t_out x s_out)

  ViewRole role(int t, int s) const { return roles[static_cast<size_t>(t) * s_out + s]; }
  bool is_input_row(int t) const { return t % t_step == 0; }
  bool is_input_col(int s) const { return s % s_step == 0; }
};

inline ViewGrid make_view_grid(int t_in, int s_in, int t_out, int s_out) {
  if (t_in < 2 || s_in < 2) throw std::invalid_argument("view grid: input lattice too small");
  if (t_out < t_in || s_out < s_in)
    throw std::invalid_argument("view grid: output smaller than input");
  if ((t_out - 1) % (t_in - 1) != 0 || (s_out - 1) % (s_in - 1) != 0)
    throw std::invalid_argument(
        "view grid: (out-1) must be a multiple of (in-1) on both axes");
  ViewGrid g;
  g.t_out = t_out;
  g.s_out = s_out;
  g.t_step = (t_out - 1) / (t_in - 1);
  g.s_step = (s_out - 1) / (s_in - 1);
  g.roles.resize(static_cast<size_t>(t_out) * s_out);
  for (int t = 0; t < t_out; ++t) {
    for (int s = 0; s < s_out; ++s) {
      const bool rt = (t % g.t_step == 0);
      const bool cs = (s % g.s_step == 0);
      ViewRole r;
      if (rt && cs) r = ViewRole::Input;
      else if (rt) r = ViewRole::Step1H;
      else if (cs) r = ViewRole::Step1V;
      else r = ViewRole::Step2;
      g.roles[static_cast<size_t>(t) * s_out + s] = r;
    }
  }
  return g;
}

}  // namespace lfepi
