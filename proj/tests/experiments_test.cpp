// Tests of the experiment drivers shared by the CLI and the acceptance suite.

#include "qsaf/experiments.hpp"
#include "qsaf/random.hpp"

#include <gtest/gtest.h>

using namespace qsaf;
using namespace qsaf::experiments;

namespace {

TEST(BlochDenoise, IdenticalInputPurifiesAlongItsAxis) {
  const int side = 6;
  const Eigen::Vector3d d0(0.4, 0.2, 0.1);
  std::vector<Eigen::Vector3d> field(static_cast<std::size_t>(side) * side, d0);

  FlowConfig cfg;
  cfg.purity_tol = bloch_purity_tol();
  cfg.max_iters = 5000;
  cfg.record_every = 5000;
  const auto outcome = bloch_denoise(field, side, side, cfg);
  ASSERT_TRUE(outcome.flow.converged);
  EXPECT_GE(outcome.min_norm, kBlochStopNorm);
  const Eigen::Vector3d axis = d0.normalized();
  for (const auto& d : outcome.decoded)
    EXPECT_LE((d.normalized() - axis).norm(), 1e-8);
}

TEST(BlochDenoise, NoiselessQuadrantsRecoverNearestPureStates) {
  const int side = 12;
  const auto synth = make_quadrant_bloch(side, side, 0.0, 1);
  FlowConfig cfg;
  cfg.purity_tol = bloch_purity_tol();
  cfg.max_iters = 5000;
  cfg.record_every = 5000;
  const auto outcome = bloch_denoise(synth.clean, side, side, cfg);
  ASSERT_TRUE(outcome.flow.converged);

  int interior = 0, matched = 0;
  for (int y = 1; y + 1 < side; ++y)
    for (int x = 1; x + 1 < side; ++x) {
      const int region = synth.region[static_cast<std::size_t>(y) * side + x];
      bool inside = true;
      for (int dy = -1; dy <= 1 && inside; ++dy)
        for (int dx = -1; dx <= 1 && inside; ++dx)
          inside =
              synth.region[static_cast<std::size_t>(y + dy) * side + (x + dx)] == region;
      if (!inside) continue;
      ++interior;
      const Eigen::Vector3d decoded =
          outcome.decoded[static_cast<std::size_t>(y) * side + x].normalized();
      if ((decoded - synth.region_dirs[static_cast<std::size_t>(region)].normalized())
              .norm() < 0.2)
        ++matched;
    }
  ASSERT_GT(interior, 0);
  EXPECT_EQ(matched, interior);
}

TEST(BlochDenoise, GaussianWeightsSharpenRegionBorders) {
  // with data-adaptive weights the borders average less across regions;
  // the run must still converge and keep interior labels
  const int side = 8;
  const auto synth = make_quadrant_bloch(side, side, 0.1, 5);
  FlowConfig cfg;
  cfg.purity_tol = bloch_purity_tol();
  cfg.max_iters = 5000;
  cfg.record_every = 5000;
  const auto outcome = bloch_denoise(synth.noisy, side, side, cfg, 4.0);
  EXPECT_TRUE(outcome.flow.converged);
  EXPECT_GE(outcome.min_norm, kBlochStopNorm);
}

TEST(PatchSmooth, SinglePatchImageReproducesItself) {
  Rng rng(111);
  const int s = 4;
  Eigen::MatrixXd gray(s, s);
  for (int r = 0; r < s; ++r)
    for (int c = 0; c < s; ++c) gray(r, c) = rng.uniform(0.1, 0.9);

  PatchSmoothParams params;
  params.side = s;
  params.encoder = PatchEncoder::kRankOne;
  params.flow.purity_tol = 1e-6;
  params.flow.max_iters = 10000;
  params.flow.record_every = 10000;
  const auto outcome = patch_smooth(gray, params);
  ASSERT_TRUE(outcome.flow.converged);
  EXPECT_EQ(outcome.skipped, 0);
  EXPECT_LE((outcome.output_gray - gray).norm(), 1e-2 * gray.norm());
}

TEST(PatchSmooth, ZeroPatchesAreSkippedAndPassedThrough) {
  Rng rng(112);
  const int s = 3;
  Eigen::MatrixXd gray(s, 3 * s);
  for (int r = 0; r < s; ++r)
    for (int c = 0; c < 3 * s; ++c) gray(r, c) = rng.uniform(0.0, 1.0);
  gray.block(0, s, s, s).setConstant(0.5);  // middle patch has no structure

  PatchSmoothParams params;
  params.side = s;
  params.flow.purity_tol = 1e-4;
  params.flow.max_iters = 10000;
  params.flow.record_every = 10000;
  const auto outcome = patch_smooth(gray, params);
  EXPECT_EQ(outcome.skipped, 1);
  EXPECT_EQ(outcome.vertex_of_patch[1], -1);
  EXPECT_LE((outcome.output_gray.block(0, s, s, s).array() - 0.5).matrix().norm(), 1e-12);
}

TEST(PatchSmooth, FourierModeSelfConsistentOnCleanStructuredInput) {
  // clean input dominated by the Nyquist checkerboard: its frequency is
  // self-conjugate, so the flow limit is unique and the decoded patches stay
  // close to the input
  const int s = 4, tiles = 3;
  Eigen::MatrixXd cell(s, s);
  for (int r = 0; r < s; ++r)
    for (int c = 0; c < s; ++c) cell(r, c) = 0.5 + 0.4 * (((r + c) % 2 == 0) ? 1.0 : -1.0);
  cell(0, 0) += 0.05;  // small asymmetric component to filter
  Eigen::MatrixXd gray(s * tiles, s * tiles);
  for (int pr = 0; pr < tiles; ++pr)
    for (int pc = 0; pc < tiles; ++pc) gray.block(pr * s, pc * s, s, s) = cell;

  PatchSmoothParams params;
  params.side = s;
  params.encoder = PatchEncoder::kFourier;
  params.flow.purity_tol = 1e-5;
  params.flow.max_iters = 20000;
  params.flow.record_every = 20000;
  const auto outcome = patch_smooth(gray, params);
  ASSERT_TRUE(outcome.flow.converged);
  for (std::size_t p = 0; p < outcome.decoded.size(); ++p) {
    const double corr = vec_rows(outcome.decoded[p].values())
                            .dot(vec_rows(outcome.input.patches[p].values()));
    EXPECT_GE(corr, 0.99);
  }
}

TEST(PatchSmooth, NearestPatchAdjacencyRuns) {
  Rng rng(113);
  const int s = 3, tiles = 3;
  Eigen::MatrixXd gray(s * tiles, s * tiles);
  for (int r = 0; r < gray.rows(); ++r)
    for (int c = 0; c < gray.cols(); ++c) gray(r, c) = rng.uniform(0.0, 1.0);

  PatchSmoothParams params;
  params.side = s;
  params.adjacency = PatchAdjacency::kNearestPatches;
  params.knn = 4;
  params.gaussian_tau = 1.0;
  params.flow.max_iters = 2000;
  params.flow.record_every = 2000;
  const auto outcome = patch_smooth(gray, params);
  EXPECT_EQ(outcome.decoded.size(), 9u);
  EXPECT_EQ(outcome.output_gray.rows(), s * tiles);
}

}  // namespace
