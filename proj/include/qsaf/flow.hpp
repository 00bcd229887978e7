// Coupled flows on the product manifold of density matrices over a weighted
// graph: the similarity map, the single-vertex matrix flow, the coupled
// vector field and the geometric (coordinate-Euler) integrators.

#pragma once

#include "qsaf/flow_config.hpp"
#include "qsaf/graph.hpp"
#include "qsaf/manifold.hpp"
#include "qsaf/parallel.hpp"

#include <atomic>
#include <string>
#include <vector>

namespace qsaf {

/// One density matrix per graph vertex, all of the same dimension and trace.
class ProductState {
 public:
  explicit ProductState(std::vector<DensityMatrix> states) : states_(std::move(states)) {
    detail::require(!states_.empty(), "ProductState: at least one vertex required");
    for (const auto& s : states_) {
      detail::require(s.dim() == states_[0].dim(),
                      "ProductState: mixed matrix dimensions");
      detail::require(std::abs(s.traceScale() - states_[0].traceScale()) <=
                          1e-12 * states_[0].traceScale(),
                      "ProductState: mixed trace scales");
    }
  }

  static ProductState Barycenter(int n, Eigen::Index c, double trace_scale = 1.0) {
    std::vector<DensityMatrix> s(static_cast<std::size_t>(n),
                                 DensityMatrix::Barycenter(c, trace_scale));
    return ProductState(std::move(s));
  }

  int size() const { return static_cast<int>(states_.size()); }
  Eigen::Index dim() const { return states_[0].dim(); }
  double traceScale() const { return states_[0].traceScale(); }
  const DensityMatrix& operator[](int i) const {
    return states_[static_cast<std::size_t>(i)];
  }
  const std::vector<DensityMatrix>& states() const { return states_; }

  double maxPurityGap() const {
    double gap = 0.0;
    for (const auto& s : states_) gap = std::max(gap, s.purityGap());
    return gap;
  }

 private:
  std::vector<DensityMatrix> states_;
};

using CoordinateState = std::vector<TangentMatrix>;

inline std::vector<HermitianMatrix> omega_apply(const WeightedGraph& g,
                                                const ProductState& rho) {
  detail::require(rho.size() == g.vertexCount(), "omega_apply: shape mismatch");
  std::vector<HermitianMatrix> out;
  out.reserve(static_cast<std::size_t>(rho.size()));
  for (int i = 0; i < g.vertexCount(); ++i) {
    const auto& list = g.neighbors(i);
    const auto& w = g.weights(i);
    CMatrix acc = CMatrix::Zero(rho.dim(), rho.dim());
    for (std::size_t a = 0; a < list.size(); ++a)
      acc += w[a] * rho[list[a]].matrix();
    out.emplace_back(std::move(acc));
  }
  return out;
}

/// Similarity map S_i(rho) = gamma(sum_k w_ik (log_m rho_k - D_k)).
inline ProductState similarity(const WeightedGraph& g, const ProductState& rho,
                               const std::vector<HermitianMatrix>& data) {
  detail::require(rho.size() == g.vertexCount() &&
                      static_cast<int>(data.size()) == g.vertexCount(),
                  "similarity: one state and one data matrix per vertex required");
  std::vector<HermitianMatrix> shifted;
  shifted.reserve(data.size());
  for (int k = 0; k < g.vertexCount(); ++k) {
    detail::require(data[static_cast<std::size_t>(k)].dim() == rho.dim(),
                    "similarity: data dimension mismatch");
    shifted.push_back(matrix_log(rho[k]) - data[static_cast<std::size_t>(k)]);
  }
  const auto averaged = omega_apply(g, shifted);
  std::vector<DensityMatrix> out;
  out.reserve(averaged.size());
  for (const auto& m : averaged) out.push_back(gamma(m, rho.traceScale()));
  return ProductState(std::move(out));
}

/// Similarity map at the barycenter state, the initial point of the coupled
/// flow: gamma(-sum_k w_ik D_k) per vertex.
inline ProductState initial_similarity_state(const WeightedGraph& g,
                                             const std::vector<HermitianMatrix>& data,
                                             double trace_scale = 1.0) {
  detail::require(!data.empty(), "initial_similarity_state: empty dataset");
  return similarity(g, ProductState::Barycenter(g.vertexCount(), data[0].dim(), trace_scale),
                    data);
}

/// Coupled vector field, factorwise replicator of the similarity matrices.
inline CoordinateState qsaf_vector_field(const WeightedGraph& g, const ProductState& rho,
                                         const std::vector<HermitianMatrix>& data) {
  const ProductState s = similarity(g, rho, data);
  CoordinateState out;
  out.reserve(static_cast<std::size_t>(rho.size()));
  for (int i = 0; i < rho.size(); ++i)
    out.push_back(replicator(rho[i], s[i].hermitian()));
  return out;
}

/// Potential J(mu) = -1/2 <mu, Omega[mu]> driving the coupled flow on
/// symmetric graphs (computable for any graph).
inline double potential(const WeightedGraph& g, const ProductState& mu) {
  const auto averaged = omega_apply(g, mu);
  double acc = 0.0;
  for (int i = 0; i < mu.size(); ++i)
    acc += frobenius_inner(mu[i], averaged[static_cast<std::size_t>(i)]);
  return -0.5 * acc;
}

struct DensityFlowResult {
  std::vector<DensityMatrix> trajectory;
  std::vector<int> recorded_iters;
  bool converged = false;
  int iterations = 0;

  const DensityMatrix& finalState() const { return trajectory.back(); }
};

/// Single-vertex matrix flow rho' = R_rho[L_rho(D)] from the barycenter,
/// integrated in chart coordinates: b_{t+1} = b_t + eps Pi[gamma(b_t - D)].
inline DensityFlowResult sqsaf_integrate(const HermitianMatrix& data,
                                         const FlowConfig& cfg) {
  cfg.validate();
  const Eigen::Index c = data.dim();
  CMatrix b = CMatrix::Zero(c, c);
  DensityFlowResult res;
  for (int t = 0;; ++t) {
    const DensityMatrix rho = gamma(HermitianMatrix(b), cfg.trace_scale);
    const bool last = rho.purityGap() <= cfg.purity_tol || t >= cfg.max_iters;
    if (t % cfg.record_every == 0 || last) {
      res.trajectory.push_back(rho);
      res.recorded_iters.push_back(t);
    }
    res.iterations = t;
    if (last) {
      res.converged = rho.purityGap() <= cfg.purity_tol;
      break;
    }
    const DensityMatrix lik = gamma(HermitianMatrix(b - data.matrix()), cfg.trace_scale);
    CMatrix upd = lik.matrix();
    upd.diagonal().array() -= Complex(lik.matrix().trace().real() / static_cast<double>(c), 0.0);
    b += cfg.step_size * upd;
    // kill roundoff drift of the traceless constraint
    b.diagonal().array() -= Complex(b.trace().real() / static_cast<double>(c), 0.0);
  }
  return res;
}

struct ProductFlowResult {
  std::vector<ProductState> trajectory;
  std::vector<int> recorded_iters;
  std::vector<DiagnosticsRow> diagnostics;
  CoordinateState final_coords;
  bool converged = false;
  int iterations = 0;

  const ProductState& finalState() const { return trajectory.back(); }
};

/// Geometric integration of the coupled flow mu' = R_mu[Omega[mu]] in chart
/// coordinates: (A_{t+1})_i = (A_t)_i + eps Pi[(Omega[Gamma(A_t)])_i], with
/// the averaged matrices re-Hermitized each step. Stops when the largest
/// per-vertex purity gap falls below cfg.purity_tol. The trace scale is taken
/// from the initial state. Vertices update in parallel; results do not depend
/// on the thread count.
inline ProductFlowResult mu_flow_integrate(const WeightedGraph& g, const ProductState& mu0,
                                           const FlowConfig& cfg) {
  cfg.validate();
  detail::require(mu0.size() == g.vertexCount(),
                  "mu_flow_integrate: one state per vertex required");
  const std::size_t n = static_cast<std::size_t>(mu0.size());
  const Eigen::Index c = mu0.dim();
  const double tau = mu0.traceScale();

  std::vector<CMatrix> coords(n);
  for (std::size_t i = 0; i < n; ++i)
    coords[i] = gamma_inv(mu0[static_cast<int>(i)]).matrix();
  std::vector<DensityMatrix> mu = mu0.states();
  std::vector<CMatrix> field(n);
  std::vector<double> pairing(n);

  ProductFlowResult res;
  for (int t = 0;; ++t) {
    parallel_for(n, cfg.threads, [&](std::size_t i) {
      const auto& list = g.neighbors(static_cast<int>(i));
      const auto& w = g.weights(static_cast<int>(i));
      CMatrix acc = CMatrix::Zero(c, c);
      for (std::size_t a = 0; a < list.size(); ++a)
        acc += w[a] * mu[static_cast<std::size_t>(list[a])].matrix();
      field[i] = 0.5 * (acc + acc.adjoint());
      pairing[i] = (mu[i].matrix().array() * field[i].array().conjugate()).sum().real();
    });

    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, mu[i].purityGap());
    double pot = 0.0;
    for (std::size_t i = 0; i < n; ++i) pot += pairing[i];
    res.diagnostics.push_back({t, gap, -0.5 * pot});

    const bool last = gap <= cfg.purity_tol || t >= cfg.max_iters;
    if (t % cfg.record_every == 0 || last) {
      res.trajectory.emplace_back(mu);
      res.recorded_iters.push_back(t);
    }
    res.iterations = t;
    if (last) {
      res.converged = gap <= cfg.purity_tol;
      break;
    }

    std::atomic<int> bad{-1};
    parallel_for(n, cfg.threads, [&](std::size_t i) {
      CMatrix upd = field[i];
      upd.diagonal().array() -=
          Complex(upd.trace().real() / static_cast<double>(c), 0.0);
      coords[i] += cfg.step_size * upd;
      coords[i].diagonal().array() -=
          Complex(coords[i].trace().real() / static_cast<double>(c), 0.0);
      if (!coords[i].allFinite()) {
        int expected = -1;
        bad.compare_exchange_strong(expected, static_cast<int>(i));
        return;
      }
      mu[i] = gamma(HermitianMatrix(coords[i]), tau);
    });
    if (bad.load() >= 0)
      throw std::runtime_error("mu_flow_integrate: non-finite coordinate at vertex " +
                               std::to_string(bad.load()) + ", iteration " +
                               std::to_string(t + 1));
  }

  res.final_coords.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    res.final_coords.emplace_back(HermitianMatrix(coords[i]));
  return res;
}

/// Lifts a per-step trajectory of the reparametrized flow back to the assignment
/// states: B_{t+1} = B_t + eps Pi[mu_t], rho_t = gamma(B_t), B_0 = 0. The input
/// must be recorded at every step (record_every = 1) with the same step size.
inline std::vector<ProductState> rho_flow_lift(const WeightedGraph& g,
                                               const std::vector<ProductState>& mu_trajectory,
                                               const FlowConfig& cfg) {
  cfg.validate();
  detail::require(!mu_trajectory.empty(), "rho_flow_lift: empty trajectory");
  const std::size_t n = static_cast<std::size_t>(g.vertexCount());
  const Eigen::Index c = mu_trajectory.front().dim();
  const double tau = mu_trajectory.front().traceScale();
  for (const auto& snap : mu_trajectory)
    detail::require(snap.size() == g.vertexCount(),
                    "rho_flow_lift: trajectory length mismatch with graph");

  std::vector<CMatrix> b(n, CMatrix::Zero(c, c));
  std::vector<ProductState> out;
  out.reserve(mu_trajectory.size());
  out.push_back(ProductState::Barycenter(g.vertexCount(), c, tau));
  for (std::size_t k = 1; k < mu_trajectory.size(); ++k) {
    const ProductState& prev = mu_trajectory[k - 1];
    std::vector<DensityMatrix> states;
    states.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      CMatrix upd = prev[static_cast<int>(i)].matrix();
      upd.diagonal().array() -=
          Complex(upd.trace().real() / static_cast<double>(c), 0.0);
      b[i] += cfg.step_size * upd;
      states.push_back(gamma(HermitianMatrix(b[i]), tau));
    }
    out.emplace_back(std::move(states));
  }
  return out;
}

}  // namespace qsaf
