#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "lfepi/blur.hpp"
#include "lfepi/cnn.hpp"
#include "lfepi/interp.hpp"
#include "lfepi/light_field.hpp"

namespace lfepi {

struct TrainConfig {
  int batch_size = 64;
  double momentum = 0.9;
  // (iteration threshold, learning rate); thresholds strictly increasing.
  std::vector<std::pair<long, double>> lr_schedule = {{0, 0.01}, {25000, 0.001}, {50000, 0.0001}};
  long total_iterations = 0;
  std::uint64_t seed = 1;
  double init_std = 1e-3;
  int patch_size = 17;
  int patch_stride = 14;
  bool aug_flip = true;
  bool aug_spatial_downsample = false;
  bool aug_gaussian_noise = false;
  bool aug_scale = true;
  double noise_std = 0.01;

  void validate() const {
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (!(momentum >= 0.0 && momentum < 1.0))
      throw std::invalid_argument("TrainConfig: momentum must be in [0,1)");
    if (lr_schedule.empty()) throw std::invalid_argument("TrainConfig: empty lr schedule");
    long prev = -1;
    for (const auto& [it, lr] : lr_schedule) {
      if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: learning rates must be positive");
      if (it <= prev) throw std::invalid_argument("TrainConfig: schedule thresholds must increase");
      prev = it;
    }
    if (patch_size < 1 || patch_stride < 1)
      throw std::invalid_argument("TrainConfig: bad patch geometry");
  }

  double lr_at(long iteration) const {
    double lr = lr_schedule.front().second;
    for (const auto& [it, v] : lr_schedule)
      if (iteration >= it) lr = v;
    return lr;
  }
};

namespace detail {

inline EPI take_rows(const EPI& e, int step) {
  const int a2 = (e.n_views - 1) / step + 1;
  EPI out(a2, e.width);
  out.max_disparity_px = e.max_disparity_px * step;
  for (int a = 0; a < a2; ++a)
    for (int x = 0; x < e.width; ++x) out.at(a, x) = e.at(a * step, x);
  return out;
}

inline EPI flip_x(const EPI& e) {
  EPI out(e.n_views, e.width);
  out.max_disparity_px = -e.max_disparity_px;
  for (int a = 0; a < e.n_views; ++a)
    for (int x = 0; x < e.width; ++x) out.at(a, x) = e.at(a, e.width - 1 - x);
  return out;
}

inline EPI flip_angular(const EPI& e) {
  EPI out(e.n_views, e.width);
  out.max_disparity_px = -e.max_disparity_px;
  for (int a = 0; a < e.n_views; ++a)
    for (int x = 0; x < e.width; ++x) out.at(a, x) = e.at(e.n_views - 1 - a, x);
  return out;
}

/// Aligned tiling of an (input, target) EPI pair into patch pairs. EPIs with
/// fewer angular rows than the patch size fall back to (A x patch) tiles
/// strided along x only.
inline void tile_pair(const EPI& input, const EPI& target, int patch, int stride,
                      std::vector<PatchPair>& out) {
  const int A = input.n_views, W = input.width;
  const int ph = A >= patch ? patch : A;
  const int ny = A >= patch ? (A - patch) / stride + 1 : 1;
  if (W < patch) return;
  const int nx = (W - patch) / stride + 1;
  for (int ty = 0; ty < ny; ++ty) {
    for (int tx = 0; tx < nx; ++tx) {
      PatchPair p;
      p.input = Image2D(ph, patch);
      p.target_residual = Image2D(ph, patch);
      const int y0 = ty * stride, x0 = tx * stride;
      for (int y = 0; y < ph; ++y) {
        for (int x = 0; x < patch; ++x) {
          const double in_v = input.at(y0 + y, x0 + x);
          p.input.at(y, x) = in_v;
          p.target_residual.at(y, x) = target.at(y0 + y, x0 + x) - in_v;
        }
      }
      out.push_back(std::move(p));
    }
  }
}

/// Luma EPIs of a light field: horizontal slices for every (t, y).
inline std::vector<EPI> luma_row_epis(const LightField4D& lf) {
  const LightField4D* src = &lf;
  LightField4D conv;
  if (lf.C == 3 && lf.space == ChannelSpace::RGB) {
    conv = convert_color(lf, ColorDirection::RgbToYCbCr);
    src = &conv;
  }
  std::vector<EPI> epis;
  epis.reserve(static_cast<size_t>(src->T) * src->H);
  for (int t = 0; t < src->T; ++t)
    for (int y = 0; y < src->H; ++y)
      epis.push_back(extract_epi(*src, EpiOrientation::Horizontal, y, t, 0));
  return epis;
}

/// Fisher-Yates with a multiply-shift bounded draw; avoids the
/// implementation-defined std::shuffle/distribution path so shuffles are
/// reproducible everywhere.
inline void shuffle_indices(std::vector<size_t>& idx, std::mt19937_64& rng) {
  for (size_t i = idx.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(
        (static_cast<unsigned __int128>(rng()) * i) >> 64);
    std::swap(idx[i - 1], idx[j]);
  }
}

}  // namespace detail

/// Builds the residual training set: for each dense EPI and undersampling
/// factor, pairs the blurred-downsampled-upsampled EPI with the blurred
/// dense EPI, tiled into aligned patches. Optional augmentations add
/// flipped, spatially downsampled, noisy-input and scale-cascade variants.
inline std::vector<PatchPair> build_training_set(const std::vector<LightField4D>& dense_lfs,
                                                 const BlurKernel& kernel,
                                                 const std::set<int>& factors,
                                                 const TrainConfig& cfg) {
  cfg.validate();
  if (factors.empty()) throw std::invalid_argument("build_training_set: no factors");
  std::vector<PatchPair> pairs;
  GaussianRng noise_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

  auto add_from_epi = [&](const EPI& dense) {
    const int A = dense.n_views;
    std::vector<EPI> variants;
    variants.push_back(dense);
    if (cfg.aug_flip) {
      variants.push_back(detail::flip_x(dense));
      variants.push_back(detail::flip_angular(dense));
    }
    for (const EPI& v : variants) {
      const EPI blurred = blur_epi(v, kernel);
      for (int f : factors) {
        if (f < 1 || (A - 1) % f != 0)
          throw std::invalid_argument("build_training_set: factor incompatible with view count");
        const EPI sparse = detail::take_rows(blurred, f);
        if (sparse.n_views < 3)
          throw std::invalid_argument("build_training_set: insufficient views for factor");
        const EPI up = resample_angular(sparse, A);
        detail::tile_pair(up, blurred, cfg.patch_size, cfg.patch_stride, pairs);
        if (cfg.aug_gaussian_noise) {
          EPI noisy = up;
          for (double& x : noisy.pix) x += cfg.noise_std * noise_rng.normal();
          detail::tile_pair(noisy, blurred, cfg.patch_size, cfg.patch_stride, pairs);
        }
      }
      // scale augmentation: factor-4 inputs against factor-2 targets, both
      // upsampled back to the dense view count (cascade training data)
      if (cfg.aug_scale && (A - 1) % 4 == 0 && (A - 1) / 4 + 1 >= 3) {
        const EPI up4 = resample_angular(detail::take_rows(blurred, 4), A);
        const EPI up2 = resample_angular(detail::take_rows(blurred, 2), A);
        detail::tile_pair(up4, up2, cfg.patch_size, cfg.patch_stride, pairs);
      }
    }
  };

  for (const LightField4D& lf : dense_lfs) {
    for (const EPI& e : detail::luma_row_epis(lf)) add_from_epi(e);
    if (cfg.aug_spatial_downsample && lf.H >= 2 && lf.W >= 2 * cfg.patch_size) {
      const LightField4D half = downsample_spatial_2x(lf);
      for (const EPI& e : detail::luma_row_epis(half)) add_from_epi(e);
    }
  }
  return pairs;
}

/// Seeded SGD-with-momentum over shuffled mini-batches. Reshuffles at every
/// epoch boundary with the same generator; loss is recorded every 100
/// iterations. Deterministic for a fixed seed and any thread count.
inline TrainState train(Network& net, const std::vector<PatchPair>& pairs,
                        const TrainConfig& cfg, int threads = 1) {
  cfg.validate();
  if (pairs.empty()) throw std::invalid_argument("train: empty dataset");
  TrainState state(net);
  std::mt19937_64 rng(cfg.seed);
  std::vector<size_t> perm(pairs.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  size_t cursor = perm.size();  // forces an initial shuffle

  std::vector<const PatchPair*> batch;
  ParamBuffers grads(net);
  for (long it = 0; it < cfg.total_iterations; ++it) {
    batch.clear();
    for (int k = 0; k < cfg.batch_size; ++k) {
      if (cursor >= perm.size()) {
        detail::shuffle_indices(perm, rng);
        cursor = 0;
      }
      batch.push_back(&pairs[perm[cursor++]]);
    }
    const double loss = batch_loss_and_gradients(net, batch, grads, threads);
    sgd_step(net, grads, state, cfg.lr_at(it), cfg.momentum);
    if (state.iteration % 100 == 0) state.loss_history.emplace_back(state.iteration, loss);
  }
  return state;
}

}  // namespace lfepi
