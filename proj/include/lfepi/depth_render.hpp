#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lfepi/epi.hpp"
#include "lfepi/interp.hpp"
#include "lfepi/pipeline.hpp"

namespace lfepi {

/// Per-pixel disparity of the input EPI rows (pixels per input angular
/// step). A single-row map is broadcast along the angular axis.
struct DisparityMap {
  Image2D values;
  double d_min = 0.0;
  double d_max = 0.0;

  void validate() const {
    if (values.rows < 1 || values.cols < 1)
      throw std::invalid_argument("DisparityMap: empty");
    if (!(d_min <= d_max)) throw std::invalid_argument("DisparityMap: d_min > d_max");
    for (double v : values.data) {
      if (!std::isfinite(v)) throw std::invalid_argument("DisparityMap: non-finite value");
      if (v < d_min - 1e-9 || v > d_max + 1e-9)
        throw std::invalid_argument("DisparityMap: value outside [d_min, d_max]");
    }
  }
};

struct DisparityLabels {
  int rows = 0, cols = 0;
  std::vector<int> label;

  int at(int r, int c) const { return label[static_cast<size_t>(r) * cols + c]; }
  int& at(int r, int c) { return label[static_cast<size_t>(r) * cols + c]; }
};

/// Uniformly spaced levels over [d_min, d_max] (midpoint for a single
/// level); every pixel is assigned its nearest level, so the quantization
/// error is at most half the level spacing.
inline std::pair<std::vector<double>, DisparityLabels> discretize_disparity(
    const DisparityMap& dmap, int n_levels) {
  if (n_levels < 1) throw std::invalid_argument("discretize_disparity: n_levels must be >= 1");
  dmap.validate();
  std::vector<double> levels(n_levels);
  if (n_levels == 1) {
    levels[0] = 0.5 * (dmap.d_min + dmap.d_max);
  } else {
    const double step = (dmap.d_max - dmap.d_min) / (n_levels - 1);
    for (int i = 0; i < n_levels; ++i) levels[i] = dmap.d_min + step * i;
  }
  DisparityLabels lab;
  lab.rows = dmap.values.rows;
  lab.cols = dmap.values.cols;
  lab.label.resize(dmap.values.size());
  const double step = n_levels > 1 ? (dmap.d_max - dmap.d_min) / (n_levels - 1) : 0.0;
  for (size_t i = 0; i < dmap.values.data.size(); ++i) {
    int l = 0;
    if (step > 0.0)
      l = std::clamp(static_cast<int>(std::lround((dmap.values.data[i] - dmap.d_min) / step)), 0,
                     n_levels - 1);
    lab.label[i] = l;
  }
  return {levels, lab};
}

/// Propagates each input-row label region along its level's trajectory to
/// every output row. Conflicts resolve to the larger disparity (nearer
/// surface occludes); unclaimed pixels take the nearest claimed label along
/// x. The returned masks partition the (out_views x W) domain exactly.
inline std::vector<Image2D> build_masks(const DisparityLabels& labels, int out_views,
                                        const std::vector<double>& levels) {
  if (levels.empty()) throw std::invalid_argument("build_masks: empty level set");
  if (out_views < 1) throw std::invalid_argument("build_masks: out_views must be >= 1");
  const int A = labels.rows, W = labels.cols;
  std::vector<int> claim(static_cast<size_t>(out_views) * W, -1);
  auto claim_at = [&](int j, int x) -> int& { return claim[static_cast<size_t>(j) * W + x]; };

  for (int a = 0; a < A; ++a) {
    for (int x = 0; x < W; ++x) {
      const int l = labels.at(a, x);
      if (l < 0 || l >= static_cast<int>(levels.size()))
        throw std::invalid_argument("build_masks: label out of range");
      const double d = levels[l];
      for (int j = 0; j < out_views; ++j) {
        // output row position in input units
        const double tau =
            out_views > 1 ? static_cast<double>(j * (A - 1)) / (out_views - 1) : 0.0;
        const int xp = static_cast<int>(std::lround(x + d * (tau - a)));
        if (xp < 0 || xp >= W) continue;
        int& c = claim_at(j, xp);
        if (c == -1 || levels[l] > levels[c]) c = l;
      }
    }
  }

  // close seams: nearest claimed label along x, ties to the left
  for (int j = 0; j < out_views; ++j) {
    int last = -1, last_x = -1;
    std::vector<int> left(W, -1), left_d(W, 0);
    for (int x = 0; x < W; ++x) {
      if (claim_at(j, x) != -1) {
        last = claim_at(j, x);
        last_x = x;
      }
      left[x] = last;
      left_d[x] = last == -1 ? 0 : x - last_x;
    }
    last = -1;
    last_x = -1;
    for (int x = W - 1; x >= 0; --x) {
      if (claim_at(j, x) != -1) {
        last = claim_at(j, x);
        last_x = x;
      } else {
        int pick = left[x];
        if (last != -1 && (pick == -1 || (last_x - x) < left_d[x])) pick = last;
        if (pick != -1) claim_at(j, x) = pick;
      }
    }
  }
  // a fully unclaimed row can only happen when every trajectory exits the
  // image; fall back to the first level so the partition stays total
  for (int j = 0; j < out_views; ++j)
    for (int x = 0; x < W; ++x)
      if (claim_at(j, x) == -1) claim_at(j, x) = 0;

  std::vector<Image2D> masks(levels.size());
  for (size_t i = 0; i < levels.size(); ++i) masks[i] = Image2D(out_views, W, 0.0);
  for (int j = 0; j < out_views; ++j)
    for (int x = 0; x < W; ++x) masks[claim_at(j, x)].at(j, x) = 1.0;
  return masks;
}

/// Depth-assisted rendering: shear by each discretized disparity, run the
/// reconstruction chain, shear back by D_i divided by the upsampling factor,
/// and blend the per-level results through the partition masks.
inline EPI depth_assisted_render(const EPI& epi_L, const DisparityMap& dmap,
                                 const PipelineConfig& cfg, int n_levels, int out_views) {
  if (epi_L.n_views < 3)
    throw std::invalid_argument("depth_assisted_render: need at least 3 views");
  if (out_views < epi_L.n_views)
    throw std::invalid_argument("depth_assisted_render: out_views must be >= input views");
  DisparityMap dm = dmap;
  if (dm.values.rows == 1 && epi_L.n_views > 1) {
    Image2D b(epi_L.n_views, dm.values.cols);
    for (int a = 0; a < epi_L.n_views; ++a)
      for (int x = 0; x < dm.values.cols; ++x) b.at(a, x) = dm.values.at(0, x);
    dm.values = std::move(b);
  }
  if (dm.values.rows != epi_L.n_views || dm.values.cols != epi_L.width)
    throw std::invalid_argument("depth_assisted_render: disparity map shape mismatch");

  const auto [levels, labels] = discretize_disparity(dm, n_levels);
  const std::vector<Image2D> masks = build_masks(labels, out_views, levels);
  const double alpha =
      static_cast<double>(out_views - 1) / static_cast<double>(epi_L.n_views - 1);

  EPI out(out_views, epi_L.width);
  bool first = true;
  for (size_t i = 0; i < levels.size(); ++i) {
    const Image2D& mask = masks[i];
    bool populated = false;
    for (double m : mask.data)
      if (m != 0.0) {
        populated = true;
        break;
      }
    if (!populated) continue;  // skipping an all-zero mask cannot change the blend
    const EPI sheared = shear_epi(epi_L, levels[i]);
    const EPI recon = reconstruct_epi(sheared, cfg, out_views);
    const EPI unsheared = shear_epi(recon, -levels[i] / alpha);
    if (first) {
      for (size_t k = 0; k < out.pix.size(); ++k) out.pix[k] = mask.data[k] * unsheared.pix[k];
      first = false;
    } else {
      for (size_t k = 0; k < out.pix.size(); ++k) out.pix[k] += mask.data[k] * unsheared.pix[k];
    }
  }
  if (first) throw std::invalid_argument("depth_assisted_render: empty level set");
  return out;
}

}  // namespace lfepi
