// Experiment drivers shared by the command line tools and the acceptance
// suite: Bloch-vector denoising on pixel grids and patch smoothing with
// rank-one or Fourier-frame encodings.

#pragma once

#include "qsaf/encodings.hpp"
#include "qsaf/flow.hpp"
#include "qsaf/io.hpp"
#include "qsaf/random.hpp"

#include <array>
#include <optional>

namespace qsaf::experiments {

/// Integration of the Bloch experiment stops once every vector reaches this
/// norm; as a purity gap this is (1 - 0.999^2) / 2 for two-dimensional states.
inline constexpr double kBlochStopNorm = 0.999;

inline double bloch_purity_tol() {
  return 0.5 * (1.0 - kBlochStopNorm * kBlochStopNorm);
}

/// Affine map of the RGB cube [0,1]^3 into the Bloch ball: recenter to the
/// origin and scale so the cube corners land on the sphere of radius
/// 1 - 1e-6 (the interior requirement of the state space).
inline Eigen::Vector3d rgb_to_bloch(double r, double g, double b) {
  const double s = (1.0 - kBlochBoundaryShrink) / std::sqrt(3.0);
  return s * Eigen::Vector3d(2.0 * r - 1.0, 2.0 * g - 1.0, 2.0 * b - 1.0);
}

inline std::array<std::uint8_t, 3> bloch_to_rgb(const Eigen::Vector3d& d) {
  const double s = (1.0 - kBlochBoundaryShrink) / std::sqrt(3.0);
  std::array<std::uint8_t, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const double v = 0.5 * (d(k) / s + 1.0);
    out[static_cast<std::size_t>(k)] =
        static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
  }
  return out;
}

inline std::vector<Eigen::Vector3d> image_to_bloch(const io::Image& img) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(static_cast<std::size_t>(img.width) * img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      out.push_back(rgb_to_bloch(img.at(x, y, 0) / 255.0, img.at(x, y, 1) / 255.0,
                                 img.at(x, y, 2) / 255.0));
  return out;
}

inline io::Image bloch_to_image(const std::vector<Eigen::Vector3d>& d, int width,
                                int height) {
  detail::require(static_cast<std::size_t>(width) * height == d.size(),
                  "bloch_to_image: size mismatch");
  io::Image img(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const auto rgb = bloch_to_rgb(d[static_cast<std::size_t>(y) * width + x]);
      for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = rgb[static_cast<std::size_t>(ch)];
    }
  return img;
}

/// Piecewise-constant quadrant image of Bloch vectors plus a noisy copy with
/// i.i.d. Gaussian perturbations shrunk back into the ball.
struct SyntheticBloch {
  int width = 0;
  int height = 0;
  std::vector<Eigen::Vector3d> clean;
  std::vector<Eigen::Vector3d> noisy;
  std::vector<int> region;                  // region id per pixel
  std::vector<Eigen::Vector3d> region_dirs; // base vector per region
};

inline SyntheticBloch make_quadrant_bloch(int width, int height, double noise_sigma,
                                          std::uint64_t seed) {
  detail::require(width >= 2 && height >= 2, "make_quadrant_bloch: image too small");
  SyntheticBloch out;
  out.width = width;
  out.height = height;
  out.region_dirs = {Eigen::Vector3d(0.9, 0.0, 0.0), Eigen::Vector3d(0.0, 0.9, 0.0),
                     Eigen::Vector3d(0.0, 0.0, 0.9),
                     -0.9 / std::sqrt(3.0) * Eigen::Vector3d(1.0, 1.0, 1.0)};
  Rng rng(seed);
  const double rmax = 1.0 - kBlochBoundaryShrink;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int region = (y < height / 2 ? 0 : 2) + (x < width / 2 ? 0 : 1);
      out.region.push_back(region);
      const Eigen::Vector3d base = out.region_dirs[static_cast<std::size_t>(region)];
      out.clean.push_back(base);
      Eigen::Vector3d noisy = base + noise_sigma * rng.normal3();
      if (noisy.norm() > rmax) noisy *= rmax / noisy.norm();
      out.noisy.push_back(noisy);
    }
  }
  return out;
}

/// Gaussian weights from distances between per-vertex feature vectors.
inline WeightedGraph gaussian_vector_weights(const std::vector<Eigen::Vector3d>& d,
                                             const Neighborhoods& topology, double tau_w) {
  detail::require(tau_w >= 0.0, "gaussian_vector_weights: negative bandwidth");
  detail::require(d.size() == topology.size(),
                  "gaussian_vector_weights: one vector per vertex required");
  std::vector<std::vector<double>> raw(topology.size());
  for (std::size_t i = 0; i < topology.size(); ++i) {
    raw[i].reserve(topology[i].size());
    for (int k : topology[i]) {
      const double dist = (d[i] - d[static_cast<std::size_t>(k)]).norm();
      raw[i].push_back(std::exp(-tau_w * dist * dist));
    }
  }
  return WeightedGraph::FromRawWeights(topology, raw);
}

struct BlochDenoiseOutcome {
  ProductFlowResult flow;
  std::vector<Eigen::Vector3d> decoded;
  double min_norm = 0.0;
};

/// Encodes the given Bloch field on a grid graph with 3x3 neighborhoods and
/// integrates the coupled flow starting from the encoded states.
/// gaussian_tau unset selects uniform weights.
inline BlochDenoiseOutcome bloch_denoise(const std::vector<Eigen::Vector3d>& data,
                                         int width, int height, const FlowConfig& cfg,
                                         std::optional<double> gaussian_tau = {}) {
  detail::require(static_cast<std::size_t>(width) * height == data.size(),
                  "bloch_denoise: size mismatch");
  auto topology = grid_neighborhoods(height, width, 1, false);
  const WeightedGraph g =
      gaussian_tau ? gaussian_vector_weights(data, topology, *gaussian_tau)
                   : WeightedGraph::Uniform(std::move(topology));

  std::vector<DensityMatrix> states;
  states.reserve(data.size());
  for (const auto& d : data) states.push_back(bloch_encode(BlochVector(d)));

  BlochDenoiseOutcome out;
  out.flow = mu_flow_integrate(g, ProductState(std::move(states)), cfg);
  const ProductState& last = out.flow.finalState();
  out.decoded.reserve(data.size());
  out.min_norm = 1.0;
  for (int i = 0; i < last.size(); ++i) {
    const Eigen::Vector3d d = bloch_decode(last[i]).vector();
    out.min_norm = std::min(out.min_norm, d.norm());
    out.decoded.push_back(d);
  }
  return out;
}

inline Eigen::MatrixXd image_to_gray(const io::Image& img) {
  Eigen::MatrixXd gray(img.height, img.width);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      gray(y, x) = (img.at(x, y, 0) + img.at(x, y, 1) + img.at(x, y, 2)) / (3.0 * 255.0);
  return gray;
}

inline io::Image gray_to_image(const Eigen::MatrixXd& gray) {
  io::Image img(static_cast<int>(gray.cols()), static_cast<int>(gray.rows()));
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const auto v = static_cast<std::uint8_t>(
          std::lround(255.0 * std::clamp(gray(y, x), 0.0, 1.0)));
      for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = v;
    }
  return img;
}

struct PatchDecomposition {
  int patch_rows = 0;
  int patch_cols = 0;
  int side = 0;
  std::vector<Patch> patches;  // row-major over the patch grid
};

/// Splits a grayscale image into non-overlapping side x side patches,
/// cropping any remainder rows and columns.
inline PatchDecomposition image_to_patches(const Eigen::MatrixXd& gray, int side) {
  detail::require(side >= 1 && gray.rows() >= side && gray.cols() >= side,
                  "image_to_patches: image smaller than one patch");
  PatchDecomposition out;
  out.side = side;
  out.patch_rows = static_cast<int>(gray.rows()) / side;
  out.patch_cols = static_cast<int>(gray.cols()) / side;
  out.patches.reserve(static_cast<std::size_t>(out.patch_rows) * out.patch_cols);
  for (int pr = 0; pr < out.patch_rows; ++pr)
    for (int pc = 0; pc < out.patch_cols; ++pc)
      out.patches.push_back(Patch::FromRaw(gray.block(pr * side, pc * side, side, side)));
  return out;
}

inline Eigen::MatrixXd patches_to_gray(const PatchDecomposition& layout,
                                       const std::vector<Eigen::MatrixXd>& raw) {
  detail::require(raw.size() == layout.patches.size(), "patches_to_gray: size mismatch");
  Eigen::MatrixXd gray(layout.patch_rows * layout.side, layout.patch_cols * layout.side);
  for (int pr = 0; pr < layout.patch_rows; ++pr)
    for (int pc = 0; pc < layout.patch_cols; ++pc)
      gray.block(pr * layout.side, pc * layout.side, layout.side, layout.side) =
          raw[static_cast<std::size_t>(pr) * layout.patch_cols + pc];
  return gray;
}

/// Normalized grating patch with the given orientation, spatial frequency in
/// cycles per patch and phase.
inline Patch oriented_patch(int side, double angle, double cycles, double phase = 0.0) {
  Eigen::MatrixXd raw(side, side);
  const double cx = std::cos(angle), sx = std::sin(angle);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c)
      raw(r, c) = std::cos(2.0 * std::numbers::pi * cycles * (c * cx + r * sx) /
                               static_cast<double>(side) +
                           phase);
  return Patch::FromRaw(raw);
}

enum class PatchEncoder { kRankOne, kFourier };
enum class PatchAdjacency { kGrid, kNearestPatches };

struct PatchSmoothParams {
  int side = 8;
  PatchEncoder encoder = PatchEncoder::kRankOne;
  PatchAdjacency adjacency = PatchAdjacency::kGrid;
  int knn = 8;
  std::optional<double> gaussian_tau;  // unset: uniform weights
  FlowConfig flow;
};

struct PatchSmoothOutcome {
  PatchDecomposition input;
  ProductFlowResult flow;            // over non-degenerate patches only
  std::vector<int> vertex_of_patch;  // -1 for skipped all-zero patches
  int skipped = 0;
  std::vector<Patch> decoded;        // skipped patches pass through unchanged
  Eigen::MatrixXd output_gray;
};

inline HermitianMatrix encode_patch(const Patch& p, PatchEncoder encoder) {
  return encoder == PatchEncoder::kRankOne ? patch_rank_one_encode(p)
                                           : fourier_frame_encode(p);
}

inline Patch decode_patch(const DensityMatrix& mu, const Patch& reference,
                          PatchEncoder encoder, double purity_tol) {
  return encoder == PatchEncoder::kRankOne
             ? patch_rank_one_decode(mu, reference, purity_tol)
             : fourier_frame_decode(mu, reference, purity_tol);
}

/// Full pipeline over the patch graph: encode, integrate the coupled flow
/// from the similarity state, decode and reassemble. All-zero patches carry
/// no direction and are excluded from the graph.
inline PatchSmoothOutcome patch_smooth(const Eigen::MatrixXd& gray,
                                       const PatchSmoothParams& params) {
  PatchSmoothOutcome out;
  out.input = image_to_patches(gray, params.side);
  const int total = static_cast<int>(out.input.patches.size());

  out.vertex_of_patch.assign(static_cast<std::size_t>(total), -1);
  std::vector<int> patch_of_vertex;
  for (int p = 0; p < total; ++p) {
    if (out.input.patches[static_cast<std::size_t>(p)].isZero()) {
      ++out.skipped;
      continue;
    }
    out.vertex_of_patch[static_cast<std::size_t>(p)] =
        static_cast<int>(patch_of_vertex.size());
    patch_of_vertex.push_back(p);
  }
  detail::require(!patch_of_vertex.empty(), "patch_smooth: all patches degenerate");
  const int n = static_cast<int>(patch_of_vertex.size());

  std::vector<Patch> active;
  active.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v)
    active.push_back(out.input.patches[static_cast<std::size_t>(patch_of_vertex[v])]);

  Neighborhoods topology;
  if (params.adjacency == PatchAdjacency::kGrid) {
    // grid stencil on the patch grid, restricted to non-degenerate patches
    const auto full = grid_neighborhoods(out.input.patch_rows, out.input.patch_cols, 1, false);
    topology.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      for (int nb : full[static_cast<std::size_t>(patch_of_vertex[v])]) {
        const int w = out.vertex_of_patch[static_cast<std::size_t>(nb)];
        if (w >= 0) topology[static_cast<std::size_t>(v)].push_back(w);
      }
    }
  } else {
    Eigen::MatrixXd dist(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        dist(a, b) = active[static_cast<std::size_t>(a)].distanceTo(
            active[static_cast<std::size_t>(b)]);
    topology = knn_neighborhoods(dist, std::min(params.knn, n - 1));
  }

  const WeightedGraph g = params.gaussian_tau
                              ? gaussian_patch_weights(active, topology, *params.gaussian_tau)
                              : WeightedGraph::Uniform(std::move(topology));

  std::vector<HermitianMatrix> data;
  data.reserve(static_cast<std::size_t>(n));
  for (const auto& p : active) data.push_back(encode_patch(p, params.encoder));

  out.flow = mu_flow_integrate(
      g, initial_similarity_state(g, data, params.flow.trace_scale), params.flow);

  const ProductState& last = out.flow.finalState();
  std::vector<Eigen::MatrixXd> raw;
  raw.reserve(static_cast<std::size_t>(total));
  for (int p = 0; p < total; ++p) {
    const int v = out.vertex_of_patch[static_cast<std::size_t>(p)];
    const Patch& ref = out.input.patches[static_cast<std::size_t>(p)];
    if (v < 0) {
      out.decoded.push_back(ref);
    } else {
      out.decoded.push_back(
          decode_patch(last[v], ref, params.encoder, params.flow.purity_tol));
    }
    raw.push_back(out.decoded.back().raw());
  }
  out.output_gray = patches_to_gray(out.input, raw);
  return out;
}

}  // namespace qsaf::experiments
