#pragma once

#include <stdexcept>
#include <vector>

#include "lfepi/blur.hpp"
#include "lfepi/epi.hpp"
#include "lfepi/interp.hpp"

namespace lfepi {

/// Kernel-selection criterion: mean over EPI pairs of the per-pixel mean
/// squared error between the blurred-then-upsampled sparse EPI and the
/// blurred dense EPI. Used to rank sinc / Butterworth / Gaussian kernels.
inline double kernel_selection_error(const std::vector<EPI>& epis_sparse,
                                     const std::vector<EPI>& epis_dense,
                                     const BlurKernel& kernel, int out_views) {
  if (epis_sparse.size() != epis_dense.size())
    throw std::invalid_argument("kernel_selection_error: list length mismatch");
  if (epis_sparse.empty())
    throw std::invalid_argument("kernel_selection_error: empty input");
  double total = 0.0;
  for (size_t i = 0; i < epis_sparse.size(); ++i) {
    const EPI up = resample_angular(blur_epi(epis_sparse[i], kernel), out_views);
    const EPI ref = blur_epi(epis_dense[i], kernel);
    if (up.n_views != ref.n_views || up.width != ref.width)
      throw std::invalid_argument("kernel_selection_error: shape mismatch after resampling");
    total += mse_between(up.pix, ref.pix);
  }
  return total / static_cast<double>(epis_sparse.size());
}

}  // namespace lfepi
