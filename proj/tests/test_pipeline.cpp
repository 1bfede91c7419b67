#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace lfepi;

TEST(CascadeLadder, FactorWithinThresholdIsSinglePass) {
  EXPECT_EQ(cascade_ladder(3, 5, 2), (std::vector<int>{5}));
  EXPECT_EQ(cascade_ladder(5, 9, 2), (std::vector<int>{9}));
  EXPECT_EQ(cascade_ladder(5, 5, 2), (std::vector<int>{5}));
}

TEST(CascadeLadder, ThreeToNineIsTwoPassesThroughFive) {
  EXPECT_EQ(cascade_ladder(3, 9, 2), (std::vector<int>{5, 9}));
}

TEST(CascadeLadder, EveryStageFactorWithinThreshold) {
  for (auto [in, out] : {std::pair{3, 17}, {3, 7}, {5, 33}, {3, 25}}) {
    const auto stages = cascade_ladder(in, out, 2);
    int cur = in;
    for (int target : stages) {
      EXPECT_LE(static_cast<double>(target - 1) / (cur - 1), 2.0 + 1e-12);
      EXPECT_GT(target, cur);
      cur = target;
    }
    EXPECT_EQ(cur, out);
  }
}

TEST(ReconstructEpi, NearIdentityAtSameViewCount) {
  const auto& suite = testutil::shared_suite();
  PipelineConfig cfg;
  cfg.kernel = make_kernel(KernelKind::Gaussian, 1.5);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& sc : suite) {
    if (sc.meta.kind == "bands" || sc.meta.kind == "texture") continue;
    const EPI e = extract_epi(sc.dense, EpiOrientation::Horizontal, 24, 4, 0);
    const EPI r = reconstruct_epi(e, cfg, e.n_views);
    worst = std::min(worst, testutil::psnr_interior(e, r, static_cast<int>(cfg.kernel.taps.size())));
  }
  EXPECT_GE(worst, 40.0);
}

TEST(ReconstructEpi, RejectsTooFewViews) {
  EPI e(2, 16);
  PipelineConfig cfg;
  EXPECT_THROW(reconstruct_epi(e, cfg, 5), std::invalid_argument);
}

TEST(ReconstructLightfield, ThreeToSevenCountsAndInputPreservation) {
  const auto& suite = testutil::shared_suite();
  const auto& sc = suite[8];  // bands d1
  PipelineConfig cfg;
  cfg.kernel = make_kernel(KernelKind::Gaussian, sigma_for_max_disparity(1.0));
  cfg.out_views_t = 7;
  cfg.out_views_s = 7;
  const LightField4D out = reconstruct_lightfield(sc.sparse, cfg, 2);
  EXPECT_EQ(out.T, 7);
  EXPECT_EQ(out.S, 7);
  // 9 of the 49 views equal the inputs exactly at aligned positions
  for (int ti = 0; ti < 3; ++ti)
    for (int si = 0; si < 3; ++si)
      for (int y = 0; y < out.H; ++y)
        for (int x = 0; x < out.W; ++x)
          ASSERT_EQ(out.at(3 * ti, 3 * si, y, x, 0), sc.sparse.at(ti, si, y, x, 0));
}

TEST(ReconstructLightfield, FiveToNineViewCount) {
  const auto& suite = testutil::shared_suite();
  const auto& sc = suite[8];
  const LightField4D five = downsample_angular(sc.dense, 2);
  PipelineConfig cfg;
  cfg.kernel = make_kernel(KernelKind::Gaussian, sigma_for_max_disparity(0.5));
  cfg.out_views_t = 9;
  cfg.out_views_s = 9;
  const LightField4D out = reconstruct_lightfield(five, cfg, 2);
  EXPECT_EQ(out.T, 9);
  EXPECT_EQ(out.S, 9);
}

TEST(ReconstructLightfield, DenseRegimeZeroNetworkHighPsnr) {
  const auto& suite = testutil::shared_suite();
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& sc : suite) {
    if (sc.meta.sparse_disparity > 1.0 || sc.meta.kind == "bands" || sc.meta.kind == "texture")
      continue;
    PipelineConfig cfg;
    cfg.kernel = make_kernel(KernelKind::Gaussian,
                             sigma_for_max_disparity(sc.meta.sparse_disparity));
    cfg.out_views_t = 9;
    cfg.out_views_s = 9;
    const LightField4D out = reconstruct_lightfield(sc.sparse, cfg, 2);
    double se = 0.0;
    long n = 0;
    for (int t = 0; t < 9; ++t)
      for (int s = 0; s < 9; ++s) {
        if (t % 4 == 0 && s % 4 == 0) continue;
        for (int y = 0; y < out.H; ++y)
          for (int x = 0; x < out.W; ++x) {
            const double d = out.at(t, s, y, x, 0) - sc.dense.at(t, s, y, x, 0);
            se += d * d;
            ++n;
          }
      }
    worst = std::min(worst, 10.0 * std::log10(1.0 / (se / n)));
  }
  EXPECT_GE(worst, 40.0);
}

TEST(ReconstructLightfield, MisalignedOutputThrows) {
  const auto& suite = testutil::shared_suite();
  PipelineConfig cfg;
  cfg.out_views_t = 8;
  cfg.out_views_s = 9;
  EXPECT_THROW(reconstruct_lightfield(suite[0].sparse, cfg), std::invalid_argument);
}

TEST(ReconstructLightfield, TooSparseLatticeThrows) {
  LightField4D lf(2, 3, 4, 4, 1, ChannelSpace::Luma, 0.5);
  PipelineConfig cfg;
  cfg.out_views_t = 3;
  cfg.out_views_s = 5;
  EXPECT_THROW(reconstruct_lightfield(lf, cfg), std::invalid_argument);
}

TEST(ReconstructLightfield, ChromaIndependentOfNetwork) {
  // YCbCr input: the Cb/Cr planes travel through resampling only, so they
  // must be bitwise identical under different network weights
  const auto& suite = testutil::shared_suite();
  const LightField4D& src = suite[8].sparse;
  LightField4D ycc(src.T, src.S, src.H, src.W, 3, ChannelSpace::YCbCr);
  for (int t = 0; t < src.T; ++t)
    for (int s = 0; s < src.S; ++s)
      for (int y = 0; y < src.H; ++y)
        for (int x = 0; x < src.W; ++x) {
          const double v = src.at(t, s, y, x, 0);
          ycc.at(t, s, y, x, 0) = v;
          ycc.at(t, s, y, x, 1) = 0.5 + 0.3 * (v - 0.5);
          ycc.at(t, s, y, x, 2) = 0.5 - 0.2 * (v - 0.5);
        }
  PipelineConfig a;
  a.kernel = make_kernel(KernelKind::Gaussian, 0.375);
  a.out_views_t = 9;
  a.out_views_s = 9;
  PipelineConfig b = a;
  b.net = init_network(99, 0.05);
  const LightField4D ra = reconstruct_lightfield(ycc, a, 2);
  const LightField4D rb = reconstruct_lightfield(ycc, b, 2);
  double max_luma_diff = 0.0;
  for (int t = 0; t < 9; ++t)
    for (int s = 0; s < 9; ++s)
      for (int y = 0; y < src.H; ++y)
        for (int x = 0; x < src.W; ++x) {
          max_luma_diff =
              std::max(max_luma_diff, std::abs(ra.at(t, s, y, x, 0) - rb.at(t, s, y, x, 0)));
          ASSERT_EQ(ra.at(t, s, y, x, 1), rb.at(t, s, y, x, 1));
          ASSERT_EQ(ra.at(t, s, y, x, 2), rb.at(t, s, y, x, 2));
        }
  EXPECT_GT(max_luma_diff, 1e-6);  // the luma path does depend on the net
}

TEST(ViewSequence, CountCheck25To49) {
  // 25-view sequence reconstructed to 49 views
  LayeredScene scene;
  Layer l;
  l.texture = Image2D(12, 40);
  GaussianRng rng(141);
  for (double& v : l.texture.data) v = rng.uniform01();
  lfepi::detail::smooth_image(l.texture, 2.0);
  l.disparity_s = 0.4;
  scene.layers = {l};
  LightField4D seq = render_layered_lightfield(scene, 1, 25, 12, 40);
  seq.clamp01();
  PipelineConfig cfg;
  cfg.kernel = make_kernel(KernelKind::Gaussian, 0.375);
  cfg.out_views_s = 49;
  const LightField4D out = reconstruct_view_sequence(seq, cfg, 2);
  EXPECT_EQ(out.T, 1);
  EXPECT_EQ(out.S, 49);
  // inputs preserved at even positions
  for (int si = 0; si < 25; ++si)
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 40; ++x) ASSERT_EQ(out.at(0, 2 * si, y, x, 0), seq.at(0, si, y, x, 0));
}

TEST(ViewSequence, SameViewCountIsIdentityAfterInputCopyback) {
  const auto& suite = testutil::shared_suite();
  LightField4D seq(1, 9, suite[8].dense.H, suite[8].dense.W, 1);
  for (int s = 0; s < 9; ++s)
    for (int y = 0; y < seq.H; ++y)
      for (int x = 0; x < seq.W; ++x) seq.at(0, s, y, x, 0) = suite[8].dense.at(4, s, y, x, 0);
  PipelineConfig cfg;
  cfg.kernel = make_kernel(KernelKind::Gaussian, 0.375);
  cfg.out_views_s = 9;
  const LightField4D out = reconstruct_view_sequence(seq, cfg, 1);
  EXPECT_EQ(out.data, seq.data);
}

TEST(ViewSequence, RejectsNonSequence) {
  LightField4D lf(2, 5, 4, 4, 1, ChannelSpace::Luma, 0.5);
  PipelineConfig cfg;
  cfg.out_views_s = 9;
  EXPECT_THROW(reconstruct_view_sequence(lf, cfg), std::invalid_argument);
}

TEST(ViewSequence, BlackConstantStaysExactlyBlack) {
  LightField4D seq(1, 5, 6, 12, 1, ChannelSpace::Luma, 0.0);
  PipelineConfig cfg;
  cfg.kernel = make_kernel(KernelKind::Gaussian, 0.375);
  cfg.out_views_s = 9;
  const LightField4D out = reconstruct_view_sequence(seq, cfg);
  for (double v : out.data) EXPECT_EQ(v, 0.0);
}

TEST(ViewSequence, ConstantStaysConstantWithinRounding) {
  LightField4D seq(1, 5, 6, 12, 1, ChannelSpace::Luma, 0.62);
  PipelineConfig cfg;
  cfg.kernel = make_kernel(KernelKind::Gaussian, 0.375);
  cfg.out_views_s = 9;
  const LightField4D out = reconstruct_view_sequence(seq, cfg);
  for (double v : out.data) EXPECT_NEAR(v, 0.62, 1e-12);
}

TEST(Pipeline, ParallelRunsAreBitIdentical) {
  const auto& suite = testutil::shared_suite();
  PipelineConfig cfg;
  cfg.kernel = make_kernel(KernelKind::Gaussian, 1.5);
  cfg.out_views_t = 9;
  cfg.out_views_s = 9;
  cfg.net = init_network(5, 0.01);
  const LightField4D a = reconstruct_lightfield(suite[12].sparse, cfg, 1);
  const LightField4D b = reconstruct_lightfield(suite[12].sparse, cfg, 2);
  const LightField4D c = reconstruct_lightfield(suite[12].sparse, cfg, 7);
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(a.data, c.data);
}
