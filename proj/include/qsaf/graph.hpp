// Weighted graphs with row-normalized neighborhood weights, plus the
// averaging operator applied by all coupled flows.

#pragma once

#include "qsaf/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace qsaf {

using Neighborhoods = std::vector<std::vector<int>>;

/// Chebyshev-ball neighborhoods (including the center vertex) on a
/// rows x cols grid, row-major vertex order. radius 1 gives the 3x3 stencil.
inline Neighborhoods grid_neighborhoods(int rows, int cols, int radius = 1,
                                        bool periodic = false) {
  detail::require(rows >= 1 && cols >= 1 && radius >= 0,
                  "grid_neighborhoods: invalid geometry");
  Neighborhoods nbhd(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      auto& list = nbhd[static_cast<std::size_t>(r) * cols + c];
      for (int dr = -radius; dr <= radius; ++dr) {
        for (int dc = -radius; dc <= radius; ++dc) {
          int rr = r + dr, cc = c + dc;
          if (periodic) {
            rr = (rr % rows + rows) % rows;
            cc = (cc % cols + cols) % cols;
          } else if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) {
            continue;
          }
          list.push_back(rr * cols + cc);
        }
      }
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }
  return nbhd;
}

/// Each vertex adjacent to itself and its k nearest others under the given
/// pairwise distance matrix.
inline Neighborhoods knn_neighborhoods(const Eigen::MatrixXd& dist, int k) {
  const int n = static_cast<int>(dist.rows());
  detail::require(dist.cols() == n && k >= 0 && k < n,
                  "knn_neighborhoods: invalid distance matrix or k");
  Neighborhoods nbhd(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n) - 1);
    for (int j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return dist(i, a) < dist(i, b);
    });
    auto& list = nbhd[static_cast<std::size_t>(i)];
    list.push_back(i);
    list.insert(list.end(), order.begin(), order.begin() + k);
    std::sort(list.begin(), list.end());
  }
  return nbhd;
}

/// Vertex set with per-vertex neighborhoods (always containing the vertex
/// itself) and nonnegative weights summing to one per row. The symmetric flag
/// asserts mutual membership and equal weights both ways; it is verified on
/// construction.
class WeightedGraph {
 public:
  WeightedGraph(Neighborhoods neighborhoods,
                std::vector<std::vector<double>> weights, bool symmetric = false)
      : nbhd_(std::move(neighborhoods)), weights_(std::move(weights)),
        symmetric_(symmetric) {
    detail::require(!nbhd_.empty() && nbhd_.size() == weights_.size(),
                    "WeightedGraph: neighborhood/weight shape mismatch");
    const int n = vertexCount();
    for (int i = 0; i < n; ++i) {
      const auto& list = nbhd_[static_cast<std::size_t>(i)];
      const auto& w = weights_[static_cast<std::size_t>(i)];
      detail::require(list.size() == w.size() && !list.empty(),
                      "WeightedGraph: ragged neighborhood row");
      detail::require(std::find(list.begin(), list.end(), i) != list.end(),
                      "WeightedGraph: vertex missing from its own neighborhood");
      double sum = 0.0;
      for (std::size_t a = 0; a < list.size(); ++a) {
        detail::require(list[a] >= 0 && list[a] < n,
                        "WeightedGraph: neighbor index out of range");
        detail::require(w[a] >= 0.0, "WeightedGraph: negative weight");
        sum += w[a];
      }
      detail::require(std::abs(sum - 1.0) <= 1e-12,
                      "WeightedGraph: row weights must sum to one");
    }
    if (symmetric_)
      detail::require(isSymmetric(), "WeightedGraph: symmetric flag violated");
  }

  static WeightedGraph Uniform(Neighborhoods neighborhoods) {
    std::vector<std::vector<double>> w(neighborhoods.size());
    for (std::size_t i = 0; i < neighborhoods.size(); ++i)
      w[i].assign(neighborhoods[i].size(),
                  1.0 / static_cast<double>(neighborhoods[i].size()));
    WeightedGraph g(std::move(neighborhoods), std::move(w), false);
    g.symmetric_ = g.isSymmetric();
    return g;
  }

  /// Row-normalizes raw nonnegative weights.
  static WeightedGraph FromRawWeights(Neighborhoods neighborhoods,
                                      const std::vector<std::vector<double>>& raw) {
    detail::require(neighborhoods.size() == raw.size(),
                    "WeightedGraph: neighborhood/weight shape mismatch");
    std::vector<std::vector<double>> w(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      double sum = std::accumulate(raw[i].begin(), raw[i].end(), 0.0);
      detail::require(sum > 0.0, "WeightedGraph: zero weight row");
      w[i].resize(raw[i].size());
      for (std::size_t a = 0; a < raw[i].size(); ++a) w[i][a] = raw[i][a] / sum;
    }
    WeightedGraph g(std::move(neighborhoods), std::move(w), false);
    g.symmetric_ = g.isSymmetric();
    return g;
  }

  static WeightedGraph Grid(int rows, int cols, int radius = 1, bool periodic = false) {
    return Uniform(grid_neighborhoods(rows, cols, radius, periodic));
  }

  static WeightedGraph Complete(int n) {
    Neighborhoods nbhd(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      nbhd[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(n));
      std::iota(nbhd[static_cast<std::size_t>(i)].begin(),
                nbhd[static_cast<std::size_t>(i)].end(), 0);
    }
    return Uniform(std::move(nbhd));
  }

  /// Self-loops only; the averaging operator becomes the identity.
  static WeightedGraph SelfLoops(int n) {
    Neighborhoods nbhd(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) nbhd[static_cast<std::size_t>(i)] = {i};
    return Uniform(std::move(nbhd));
  }

  int vertexCount() const { return static_cast<int>(nbhd_.size()); }
  const std::vector<int>& neighbors(int i) const {
    return nbhd_[static_cast<std::size_t>(i)];
  }
  const std::vector<double>& weights(int i) const {
    return weights_[static_cast<std::size_t>(i)];
  }
  bool symmetric() const { return symmetric_; }

  double weightOf(int i, int j) const {
    const auto& list = neighbors(i);
    for (std::size_t a = 0; a < list.size(); ++a)
      if (list[a] == j) return weights(i)[a];
    return 0.0;
  }

  bool isSymmetric() const {
    const int n = vertexCount();
    for (int i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < nbhd_[static_cast<std::size_t>(i)].size(); ++a) {
        const int j = nbhd_[static_cast<std::size_t>(i)][a];
        const auto& back = neighbors(j);
        if (std::find(back.begin(), back.end(), i) == back.end()) return false;
        if (std::abs(weights(i)[a] - weightOf(j, i)) > 1e-14) return false;
      }
    }
    return true;
  }

 private:
  Neighborhoods nbhd_;
  std::vector<std::vector<double>> weights_;
  bool symmetric_ = false;
};

/// Weighted neighborhood averages of per-vertex Hermitian matrices.
inline std::vector<HermitianMatrix> omega_apply(const WeightedGraph& g,
                                                const std::vector<HermitianMatrix>& m) {
  detail::require(static_cast<int>(m.size()) == g.vertexCount(),
                  "omega_apply: one matrix per vertex required");
  std::vector<HermitianMatrix> out;
  out.reserve(m.size());
  for (int i = 0; i < g.vertexCount(); ++i) {
    const auto& list = g.neighbors(i);
    const auto& w = g.weights(i);
    CMatrix acc = CMatrix::Zero(m[0].dim(), m[0].dim());
    for (std::size_t a = 0; a < list.size(); ++a)
      acc += w[a] * m[static_cast<std::size_t>(list[a])].matrix();
    out.emplace_back(std::move(acc));
  }
  return out;
}

/// Row-wise averaging of per-vertex real vectors stored as matrix rows.
inline Eigen::MatrixXd omega_apply(const WeightedGraph& g, const Eigen::MatrixXd& rows) {
  detail::require(static_cast<int>(rows.rows()) == g.vertexCount(),
                  "omega_apply: one row per vertex required");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows.rows(), rows.cols());
  for (int i = 0; i < g.vertexCount(); ++i) {
    const auto& list = g.neighbors(i);
    const auto& w = g.weights(i);
    for (std::size_t a = 0; a < list.size(); ++a)
      out.row(i) += w[a] * rows.row(list[a]);
  }
  return out;
}

}  // namespace qsaf
