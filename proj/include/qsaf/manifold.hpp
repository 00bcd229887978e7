// Single-state maps on the density-matrix manifold: the coordinate chart
// gamma and its inverse/differentials, the replicator map, e-geodesics, the
// lifted exponential, likelihood matrices and the log-Euclidean cross-check.

#pragma once

#include "qsaf/hermitian.hpp"

namespace qsaf {

/// log tr exp_m(X), evaluated as a log-sum-exp of the eigenvalues for
/// overflow safety.
inline double psi(const HermitianMatrix& x) {
  const auto sd = spectral_decompose(x);
  const double top = sd.eigenvalues.maxCoeff();
  return top + std::log((sd.eigenvalues.array() - top).exp().sum());
}

/// Coordinate chart: gamma(Z) = tau * exp_m(Z) / tr exp_m(Z). Well defined for
/// every Hermitian Z since adding multiples of the identity cancels.
inline DensityMatrix gamma(const HermitianMatrix& z, double trace_scale = 1.0) {
  detail::require(trace_scale > 0.0, "gamma: trace scale must be positive");
  auto sd = spectral_decompose(z);
  RVector w = (sd.eigenvalues.array() - sd.eigenvalues.maxCoeff()).exp().matrix();
  w *= trace_scale / w.sum();
  return DensityMatrix(std::move(w), std::move(sd.eigenvectors), trace_scale);
}

/// Inverse chart: projection of log_m(rho / tau) onto traceless matrices.
inline TangentMatrix gamma_inv(const DensityMatrix& rho) {
  return project_traceless(HermitianMatrix(detail::map_eigenvalues(
      SpectralDecomposition{rho.eigenvalues(), rho.basis()},
      (rho.eigenvalues() / rho.traceScale()).array().log().matrix())));
}

/// Tangent-space coordinate of a state, rho = gamma(value()), together with
/// the normalizer psi of the chart.
class GammaCoordinate {
 public:
  explicit GammaCoordinate(TangentMatrix value) : value_(std::move(value)) {}

  const TangentMatrix& value() const { return value_; }
  double psi() const { return qsaf::psi(value_); }
  DensityMatrix state(double trace_scale = 1.0) const { return gamma(value_, trace_scale); }

 private:
  TangentMatrix value_;
};

/// Differential of gamma at the coordinate of rho, expressed through the
/// state itself: tmap_inv(rho, Y - (<rho,Y>/tau) I).
inline TangentMatrix dgamma_at(const DensityMatrix& rho, const HermitianMatrix& y) {
  const double pairing = frobenius_inner(rho, y) / rho.traceScale();
  CMatrix shifted = y.matrix();
  shifted.diagonal().array() -= Complex(pairing, 0.0);
  return TangentMatrix(tmap_inv(rho, HermitianMatrix(std::move(shifted))));
}

inline TangentMatrix dgamma(const TangentMatrix& h, const HermitianMatrix& y,
                            double trace_scale = 1.0) {
  return dgamma_at(gamma(h, trace_scale), y);
}

/// Differential of gamma_inv: projection of tmap(rho, X).
inline TangentMatrix dgamma_inv(const DensityMatrix& rho, const TangentMatrix& x) {
  return project_traceless(tmap(rho, x));
}

/// Replicator map, the inverse metric tensor in ambient coordinates:
/// tmap_inv(rho, X) - (<rho,X>/tau) rho. Traceless for every Hermitian X.
inline TangentMatrix replicator(const DensityMatrix& rho, const HermitianMatrix& x) {
  const double pairing = frobenius_inner(rho, x) / rho.traceScale();
  return TangentMatrix(tmap_inv(rho, x) - pairing * rho.hermitian());
}

/// Riemannian gradient under the BKM metric from the Euclidean gradient of an
/// ambient extension.
inline TangentMatrix riemannian_grad(const DensityMatrix& rho,
                                     const HermitianMatrix& euclid_grad) {
  return replicator(rho, euclid_grad);
}

/// Exponential map of the e-connection,
/// exp_e(rho, X) = gamma(gamma_inv(rho) + dgamma_inv(rho, X)).
inline DensityMatrix exp_e(const DensityMatrix& rho, const TangentMatrix& x) {
  return gamma(gamma_inv(rho) + dgamma_inv(rho, x), rho.traceScale());
}

inline TangentMatrix exp_e_inv(const DensityMatrix& rho, const DensityMatrix& mu) {
  detail::require(rho.dim() == mu.dim() &&
                      std::abs(rho.traceScale() - mu.traceScale()) <=
                          1e-12 * rho.traceScale(),
                  "exp_e_inv: states live on different manifolds");
  return dgamma_at(rho, gamma_inv(mu) - gamma_inv(rho));
}

/// Lifted exponential exp_rho(X) = gamma(gamma_inv(rho) + X), the composition
/// of exp_e with the replicator map.
inline DensityMatrix lift_exp(const DensityMatrix& rho, const TangentMatrix& x) {
  return gamma(gamma_inv(rho) + x, rho.traceScale());
}

/// Likelihood matrix lift_exp(rho, -project_traceless(D)).
inline DensityMatrix likelihood(const DensityMatrix& rho, const HermitianMatrix& data) {
  detail::require(rho.dim() == data.dim(), "likelihood: dimension mismatch");
  return lift_exp(rho, -project_traceless(data));
}

/// Exponential map of the log-Euclidean metric on positive definite matrices,
/// exp_m(log_m(rho) + tmap(rho, Y)). The result has arbitrary trace.
inline HermitianMatrix log_euclidean_exp(const DensityMatrix& rho,
                                         const HermitianMatrix& y) {
  return matrix_exp(matrix_log(rho) + tmap(rho, y));
}

}  // namespace qsaf
