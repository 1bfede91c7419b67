#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lfepi/blur.hpp"
#include "lfepi/cnn.hpp"
#include "lfepi/deblur.hpp"
#include "lfepi/interp.hpp"
#include "lfepi/light_field.hpp"
#include "lfepi/parallel.hpp"

namespace lfepi {

enum class ChromaMode { BicubicOnly };

struct PipelineConfig {
  BlurKernel kernel = make_kernel(KernelKind::Gaussian, 1.5);
  Network net;  // zero-initialized parameters make the restoration an identity
  int out_views_s = 0;
  int out_views_t = 0;
  int cascade_threshold = 2;
  double deblur_reg_eps = 1e-3;
  ChromaMode chroma_mode = ChromaMode::BicubicOnly;
};

/// Successive view-count targets so that every stage's upsampling factor
/// stays at or below the threshold. Intermediate counts sit at the rounded
/// geometric midpoint of the ladder, e.g. 3 -> 5 -> 9 for a 4x factor.
inline std::vector<int> cascade_ladder(int in_views, int out_views, int threshold) {
  if (threshold < 1) throw std::invalid_argument("cascade_ladder: threshold must be >= 1");
  if (out_views < in_views) throw std::invalid_argument("cascade_ladder: out < in");
  std::vector<int> stages;
  struct Rec {
    static void split(int a, int out, int thr, std::vector<int>& st) {
      const double factor = static_cast<double>(out - 1) / static_cast<double>(a - 1);
      if (factor <= static_cast<double>(thr)) {
        st.push_back(out);
        return;
      }
      int mid = static_cast<int>(std::lround(
                    std::sqrt(static_cast<double>(a - 1) * static_cast<double>(out - 1)))) +
                1;
      mid = std::clamp(mid, a + 1, out - 1);
      split(a, mid, thr, st);
      split(mid, out, thr, st);
    }
  };
  if (out_views == in_views) {
    stages.push_back(out_views);
    return stages;
  }
  Rec::split(in_views, out_views, threshold, stages);
  return stages;
}

/// One-channel blur -> angular bicubic -> residual restoration -> deblur
/// chain, cascaded whenever the requested factor exceeds the threshold.
inline EPI reconstruct_epi(const EPI& epi_L, const PipelineConfig& cfg, int out_views) {
  if (epi_L.n_views < 3)
    throw std::invalid_argument("reconstruct_epi: need at least 3 input views");
  const std::vector<int> stages = cascade_ladder(epi_L.n_views, out_views, cfg.cascade_threshold);
  EPI cur = epi_L;
  for (int target : stages) {
    EPI stage = blur_epi(cur, cfg.kernel);
    stage = resample_angular(stage, target);
    stage = restore(cfg.net, stage);
    cur = deblur_epi(stage, cfg.kernel, cfg.deblur_reg_eps);
  }
  return cur;
}

namespace detail {

/// Chroma planes travel through angular resampling only.
inline EPI resample_only(const EPI& epi, int out_views) { return resample_angular(epi, out_views); }

}  // namespace detail

/// Hierarchical full-light-field reconstruction:
///   Step 1: horizontal EPIs of every input row fill that row (green views);
///           vertical EPIs of every input column fill that column (blue).
///   Step 2: EPIs across the Step-1 blue views fill the remaining positions.
/// The luma channel goes through the full chain; chroma is resampled
/// bicubically. Original input views are preserved verbatim on the lattice
/// and the result is clamped to [0,1].
inline LightField4D reconstruct_lightfield(const LightField4D& lf_sparse,
                                           const PipelineConfig& cfg, int threads = 1) {
  if (lf_sparse.S < 3 || lf_sparse.T < 3)
    throw std::invalid_argument("reconstruct_lightfield: need at least 3 views per axis");
  const int T_in = lf_sparse.T, S_in = lf_sparse.S;
  const int T_out = cfg.out_views_t, S_out = cfg.out_views_s;
  const ViewGrid grid = make_view_grid(T_in, S_in, T_out, S_out);

  const bool rgb = (lf_sparse.C == 3 && lf_sparse.space == ChannelSpace::RGB);
  const LightField4D working =
      rgb ? convert_color(lf_sparse, ColorDirection::RgbToYCbCr) : lf_sparse;

  LightField4D out(T_out, S_out, working.H, working.W, working.C, working.space);
  const int H = working.H, W = working.W;

  // Step 1, horizontal pass: one reconstructed row EPI per (input row, y)
  parallel_for(static_cast<size_t>(T_in) * H, threads, [&](size_t ji) {
    const int ti = static_cast<int>(ji / H);
    const int y = static_cast<int>(ji % H);
    const EPI e = extract_epi(working, EpiOrientation::Horizontal, y, ti, 0);
    const EPI r = reconstruct_epi(e, cfg, S_out);
    const int pt = ti * grid.t_step;
    for (int s = 0; s < S_out; ++s)
      for (int x = 0; x < W; ++x) out.at(pt, s, y, x, 0) = r.at(s, x);
  });

  // Step 1, vertical pass: blue columns (overwrites the crossings; the
  // originals are restored at the end anyway)
  parallel_for(static_cast<size_t>(S_in) * W, threads, [&](size_t ji) {
    const int si = static_cast<int>(ji / W);
    const int x = static_cast<int>(ji % W);
    const EPI e = extract_epi(working, EpiOrientation::Vertical, x, si, 0);
    const EPI r = reconstruct_epi(e, cfg, T_out);
    const int ps = si * grid.s_step;
    for (int t = 0; t < T_out; ++t)
      for (int y = 0; y < H; ++y) out.at(t, ps, y, x, 0) = r.at(t, y);
  });

  // Step 2: rows through the blue views; only the yellow positions are filled
  std::vector<int> novel_rows;
  for (int t = 0; t < T_out; ++t)
    if (!grid.is_input_row(t)) novel_rows.push_back(t);
  parallel_for(novel_rows.size() * H, threads, [&](size_t ji) {
    const int t = novel_rows[ji / H];
    const int y = static_cast<int>(ji % H);
    EPI e(S_in, W);
    for (int si = 0; si < S_in; ++si)
      for (int x = 0; x < W; ++x) e.at(si, x) = out.at(t, si * grid.s_step, y, x, 0);
    const EPI r = reconstruct_epi(e, cfg, S_out);
    for (int s = 0; s < S_out; ++s) {
      if (grid.is_input_col(s)) continue;
      for (int x = 0; x < W; ++x) out.at(t, s, y, x, 0) = r.at(s, x);
    }
  });

  // Chroma: separable angular resampling (never touches the network)
  for (int c = 1; c < working.C; ++c) {
    std::vector<double> tmp(static_cast<size_t>(T_in) * S_out * H * W);
    auto tmp_at = [&](int ti, int s, int y, int x) -> double& {
      return tmp[((static_cast<size_t>(ti) * S_out + s) * H + y) * W + x];
    };
    parallel_for(static_cast<size_t>(T_in) * H, threads, [&](size_t ji) {
      const int ti = static_cast<int>(ji / H);
      const int y = static_cast<int>(ji % H);
      const EPI e = extract_epi(working, EpiOrientation::Horizontal, y, ti, c);
      const EPI r = detail::resample_only(e, S_out);
      for (int s = 0; s < S_out; ++s)
        for (int x = 0; x < W; ++x) tmp_at(ti, s, y, x) = r.at(s, x);
    });
    parallel_for(static_cast<size_t>(S_out) * W, threads, [&](size_t ji) {
      const int s = static_cast<int>(ji / W);
      const int x = static_cast<int>(ji % W);
      EPI e(T_in, H);
      for (int ti = 0; ti < T_in; ++ti)
        for (int y = 0; y < H; ++y) e.at(ti, y) = tmp_at(ti, s, y, x);
      const EPI r = detail::resample_only(e, T_out);
      for (int t = 0; t < T_out; ++t)
        for (int y = 0; y < H; ++y) out.at(t, s, y, x, c) = r.at(t, y);
    });
  }

  LightField4D result = rgb ? convert_color(out, ColorDirection::YCbCrToRgb) : std::move(out);
  result.clamp01();
  // input views survive verbatim at their lattice positions
  for (int ti = 0; ti < T_in; ++ti)
    for (int si = 0; si < S_in; ++si)
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
          for (int c = 0; c < lf_sparse.C; ++c)
            result.at(ti * grid.t_step, si * grid.s_step, y, x, c) = lf_sparse.at(ti, si, y, x, c);
  return result;
}

/// 3D (view-sequence) mode: every horizontal EPI is reconstructed to
/// out_views_s; there is no vertical pass.
inline LightField4D reconstruct_view_sequence(const LightField4D& lf_3d,
                                              const PipelineConfig& cfg, int threads = 1) {
  if (lf_3d.T != 1) throw std::invalid_argument("reconstruct_view_sequence: T must be 1");
  if (lf_3d.S < 3)
    throw std::invalid_argument("reconstruct_view_sequence: need at least 3 views");
  const int S_in = lf_3d.S, S_out = cfg.out_views_s;
  if (S_out < S_in || (S_out - 1) % (S_in - 1) != 0)
    throw std::invalid_argument(
        "reconstruct_view_sequence: (out-1) must be a multiple of (in-1)");
  const int s_step = (S_out - 1) / (S_in - 1);

  const bool rgb = (lf_3d.C == 3 && lf_3d.space == ChannelSpace::RGB);
  const LightField4D working = rgb ? convert_color(lf_3d, ColorDirection::RgbToYCbCr) : lf_3d;
  LightField4D out(1, S_out, working.H, working.W, working.C, working.space);
  const int H = working.H, W = working.W;

  parallel_for(static_cast<size_t>(H), threads, [&](size_t yi) {
    const int y = static_cast<int>(yi);
    for (int c = 0; c < working.C; ++c) {
      const EPI e = extract_epi(working, EpiOrientation::Horizontal, y, 0, c);
      const EPI r = (c == 0) ? reconstruct_epi(e, cfg, S_out) : detail::resample_only(e, S_out);
      for (int s = 0; s < S_out; ++s)
        for (int x = 0; x < W; ++x) out.at(0, s, y, x, c) = r.at(s, x);
    }
  });

  LightField4D result = rgb ? convert_color(out, ColorDirection::YCbCrToRgb) : std::move(out);
  result.clamp01();
  for (int si = 0; si < S_in; ++si)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        for (int c = 0; c < lf_3d.C; ++c)
          result.at(0, si * s_step, y, x, c) = lf_3d.at(0, si, y, x, c);
  return result;
}

}  // namespace lfepi
