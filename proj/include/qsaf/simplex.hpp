// Classical assignment flow on the probability simplex: replicator operator,
// lifting map, likelihood/similarity vectors and the coordinate-Euler
// integrators used as the commutative baseline of the matrix flows.

#pragma once

#include "qsaf/flow_config.hpp"
#include "qsaf/graph.hpp"

#include <vector>

namespace qsaf::simplex {

using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Projection onto zero-sum vectors, v - mean(v) 1.
inline RVector project_zero_sum(const RVector& v) {
  return (v.array() - v.mean()).matrix();
}

/// softmax(v) with max-subtraction; equals the lifting map at the barycenter.
inline RVector softmax(const RVector& v) {
  RVector e = (v.array() - v.maxCoeff()).exp();
  return e / e.sum();
}

/// Strictly positive probability vector.
class SimplexPoint {
 public:
  explicit SimplexPoint(RVector p) : p_(std::move(p)) {
    detail::require(p_.size() >= 1 && (p_.array() > 0.0).all(),
                    "SimplexPoint: entries must be strictly positive");
    detail::require(std::abs(p_.sum() - 1.0) <= 1e-12,
                    "SimplexPoint: entries must sum to one");
  }
  static SimplexPoint Barycenter(Eigen::Index c) {
    return SimplexPoint(RVector::Constant(c, 1.0 / static_cast<double>(c)));
  }
  const RVector& vector() const { return p_; }
  Eigen::Index dim() const { return p_.size(); }

 private:
  RVector p_;
};

/// Zero-sum tangent vector.
class SimplexTangent {
 public:
  explicit SimplexTangent(RVector v) : v_(std::move(v)) {
    detail::require(std::abs(v_.sum()) <=
                        1e-12 * static_cast<double>(v_.size()) *
                            std::max(1.0, v_.norm()),
                    "SimplexTangent: entries must sum to zero");
  }
  const RVector& vector() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }

 private:
  RVector v_;
};

/// Row-stochastic matrix with strictly positive rows, one per graph vertex.
class AssignmentMatrix {
 public:
  explicit AssignmentMatrix(RMatrix rows) : rows_(std::move(rows)) {
    detail::require(rows_.rows() >= 1 && rows_.cols() >= 1,
                    "AssignmentMatrix: empty matrix");
    detail::require((rows_.array() > 0.0).all(),
                    "AssignmentMatrix: entries must be strictly positive");
    for (Eigen::Index i = 0; i < rows_.rows(); ++i)
      detail::require(std::abs(rows_.row(i).sum() - 1.0) <= 1e-12,
                      "AssignmentMatrix: rows must sum to one");
  }
  static AssignmentMatrix Barycenter(Eigen::Index n, Eigen::Index c) {
    return AssignmentMatrix(RMatrix::Constant(n, c, 1.0 / static_cast<double>(c)));
  }
  const RMatrix& rows() const { return rows_; }
  Eigen::Index vertexCount() const { return rows_.rows(); }
  Eigen::Index dim() const { return rows_.cols(); }
  SimplexPoint row(Eigen::Index i) const { return SimplexPoint(rows_.row(i)); }

 private:
  RMatrix rows_;
};

/// Replicator operator R_p v = p.v - <p,v> p.
inline SimplexTangent replicator(const SimplexPoint& p, const RVector& v) {
  detail::require(p.dim() == v.size(), "replicator: dimension mismatch");
  const RVector pv = p.vector().cwiseProduct(v);
  return SimplexTangent(pv - pv.sum() * p.vector());
}

/// Lifting map exp_p(v) = p.e^v / <p, e^v>, guarded against overflow by
/// max-subtraction (exact by shift invariance).
inline SimplexPoint lift_exp(const SimplexPoint& p, const RVector& v) {
  detail::require(p.dim() == v.size(), "lift_exp: dimension mismatch");
  const RVector w = (p.vector().array().log() + v.array()).matrix();
  return SimplexPoint(softmax(w));
}

/// e-connection exponential map Exp_p(v) = p.e^{v/p} / <p, e^{v/p}>.
inline SimplexPoint exp_e(const SimplexPoint& p, const SimplexTangent& v) {
  return lift_exp(p, v.vector().cwiseQuotient(p.vector()));
}

/// Inverse of exp_e: R_p log(q/p).
inline SimplexTangent exp_e_inv(const SimplexPoint& p, const SimplexPoint& q) {
  return replicator(p, (q.vector().cwiseQuotient(p.vector())).array().log().matrix());
}

/// Likelihood vector exp_p(-pi_0 D).
inline SimplexPoint likelihood(const SimplexPoint& p, const RVector& data) {
  detail::require(p.dim() == data.size(), "likelihood: dimension mismatch");
  return lift_exp(p, -project_zero_sum(data));
}

/// Similarity vectors S_i = softmax(sum_k w_ik (log W_k - D_k)).
inline AssignmentMatrix similarity(const AssignmentMatrix& w,
                                   const RMatrix& data, const WeightedGraph& g) {
  detail::require(w.vertexCount() == g.vertexCount() && data.rows() == w.vertexCount() &&
                      data.cols() == w.dim(),
                  "similarity: shape mismatch");
  const RMatrix logw = w.rows().array().log().matrix();
  const RMatrix avg = omega_apply(g, RMatrix(logw - data));
  RMatrix out(avg.rows(), avg.cols());
  for (Eigen::Index i = 0; i < avg.rows(); ++i)
    out.row(i) = softmax(avg.row(i).transpose()).transpose();
  return AssignmentMatrix(std::move(out));
}

inline double purity_gap(const RVector& p) { return 1.0 - p.squaredNorm(); }

struct SingleVertexResult {
  std::vector<RVector> trajectory;
  std::vector<int> recorded_iters;
  bool converged = false;
  int iterations = 0;
};

/// Single-vertex flow p' = R_p L_p(D) from the barycenter, integrated in the
/// parametrization p' = R_p q, q' = R_q q: coordinate-Euler steps on the
/// coordinates of q while accumulating p = softmax(eps * sum_t q_t).
inline SingleVertexResult single_vertex_flow(const RVector& data, const FlowConfig& cfg) {
  cfg.validate();
  detail::require(data.allFinite(), "single_vertex_flow: non-finite data");
  const Eigen::Index c = data.size();
  RVector b = -project_zero_sum(data);  // coordinates of q, q_0 = softmax(-D)
  RVector r = RVector::Zero(c);         // running integral of q
  SingleVertexResult res;
  for (int t = 0;; ++t) {
    const RVector p = softmax(project_zero_sum(r));
    const bool last = purity_gap(p) <= cfg.purity_tol || t >= cfg.max_iters;
    if (t % cfg.record_every == 0 || last) {
      res.trajectory.push_back(p);
      res.recorded_iters.push_back(t);
    }
    res.iterations = t;
    if (last) {
      res.converged = purity_gap(p) <= cfg.purity_tol;
      break;
    }
    const RVector q = softmax(b);
    b += cfg.step_size * project_zero_sum(q);
    r += cfg.step_size * q;
  }
  return res;
}

struct SFlowResult {
  std::vector<RMatrix> trajectory;
  std::vector<int> recorded_iters;
  std::vector<DiagnosticsRow> diagnostics;
  bool converged = false;
  int iterations = 0;
};

/// Coupled flow S' = R_S[Omega S] in chart coordinates:
/// a_{t+1} = a_t + eps pi_0[(Omega softmax(a_t))_i], a_0 = pi_0 log S_0.
inline SFlowResult s_flow_integrate(const AssignmentMatrix& s0, const WeightedGraph& g,
                                    const FlowConfig& cfg) {
  cfg.validate();
  detail::require(s0.vertexCount() == g.vertexCount(), "s_flow_integrate: shape mismatch");
  const Eigen::Index n = s0.vertexCount();
  const Eigen::Index c = s0.dim();

  RMatrix a(n, c);
  for (Eigen::Index i = 0; i < n; ++i)
    a.row(i) = project_zero_sum(s0.rows().row(i).transpose().array().log().matrix()).transpose();

  SFlowResult res;
  for (int t = 0;; ++t) {
    RMatrix s(n, c);
    for (Eigen::Index i = 0; i < n; ++i) s.row(i) = softmax(a.row(i).transpose()).transpose();
    if (!s.allFinite())
      throw std::runtime_error("s_flow_integrate: non-finite state at iteration " +
                               std::to_string(t));
    const RMatrix field = omega_apply(g, s);

    double gap = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) gap = std::max(gap, purity_gap(s.row(i).transpose()));
    double pot = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) pot += s.row(i).dot(field.row(i));
    res.diagnostics.push_back({t, gap, -0.5 * pot});

    const bool last = gap <= cfg.purity_tol || t >= cfg.max_iters;
    if (t % cfg.record_every == 0 || last) {
      res.trajectory.push_back(s);
      res.recorded_iters.push_back(t);
    }
    res.iterations = t;
    if (last) {
      res.converged = gap <= cfg.purity_tol;
      break;
    }
    for (Eigen::Index i = 0; i < n; ++i)
      a.row(i) += cfg.step_size * project_zero_sum(field.row(i).transpose()).transpose();
  }
  return res;
}

}  // namespace qsaf::simplex
