// Test-only reference implementations, independent of the library code paths
// they check: Gauss-Legendre quadrature for the metric operators, central
// finite differences, scaling-and-squaring for the matrix exponential and a
// Runge-Kutta integrator for the simplex flows.

#pragma once

#include "qsaf/hermitian.hpp"

#include <functional>
#include <vector>

namespace oracles {

using qsaf::CMatrix;
using qsaf::Complex;
using qsaf::RVector;

/// Gauss-Legendre nodes and weights on [0, 1] via Newton iteration on the
/// Legendre polynomials.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Quadrature gauss_legendre(int n) {
  Quadrature q;
  q.nodes.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // initial guess on [-1, 1]
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);  // map to [0, 1]
    q.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

/// Matrix power rho^s from a fresh eigendecomposition.
inline CMatrix matrix_power(const CMatrix& rho, double s) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  const RVector lam = es.eigenvalues().array().pow(s).matrix();
  return es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Quadrature of the integral representation of the exponential differential,
/// int_0^1 rho^{1-s} X rho^s ds.
inline CMatrix exp_differential_quadrature(const CMatrix& rho, const CMatrix& x, int nodes) {
  const auto q = gauss_legendre(nodes);
  CMatrix acc = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const double s = q.nodes[k];
    acc += q.weights[k] * (matrix_power(rho, 1.0 - s) * x * matrix_power(rho, s));
  }
  return acc;
}

/// Quadrature of the metric integral
/// int_0^inf tr(X (rho + t I)^{-1} Y (rho + t I)^{-1}) dt
/// after the substitution t = s / (1 - s).
inline double bkm_quadrature(const CMatrix& rho, const CMatrix& x, const CMatrix& y,
                             int nodes) {
  const auto q = gauss_legendre(nodes);
  const Eigen::Index c = rho.rows();
  double acc = 0.0;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const double s = q.nodes[k];
    const double t = s / (1.0 - s);
    const double jac = 1.0 / ((1.0 - s) * (1.0 - s));
    const CMatrix resolvent = (rho + t * CMatrix::Identity(c, c)).inverse();
    acc += q.weights[k] * jac * (x * resolvent * y * resolvent).trace().real();
  }
  return acc;
}

/// High-precision quadrature of int_0^1 x^{1-s} y^s ds, the logarithmic mean.
inline double log_mean_quadrature(double x, double y, int nodes = 200) {
  const auto q = gauss_legendre(nodes);
  double acc = 0.0;
  for (std::size_t k = 0; k < q.nodes.size(); ++k)
    acc += q.weights[k] * std::pow(x, 1.0 - q.nodes[k]) * std::pow(y, q.nodes[k]);
  return acc;
}

/// Scaling-and-squaring with a Taylor core, independent of the spectral path.
inline CMatrix expm_scaling_squaring(const CMatrix& a) {
  int squarings = 0;
  double norm = a.norm();
  while (norm > 0.25) {
    norm *= 0.5;
    ++squarings;
  }
  const CMatrix scaled = a / std::pow(2.0, squarings);
  CMatrix term = CMatrix::Identity(a.rows(), a.cols());
  CMatrix sum = term;
  for (int k = 1; k <= 24; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum;
}

/// Central difference (f(h) - f(-h)) / 2h for matrix-valued curves.
inline CMatrix central_difference(const std::function<CMatrix(double)>& f, double h) {
  return (f(h) - f(-h)) / (2.0 * h);
}

inline double central_difference_scalar(const std::function<double(double)>& f, double h) {
  return (f(h) - f(-h)) / (2.0 * h);
}

/// Classic fixed-step RK4 for vector ODEs.
inline RVector rk4(const std::function<RVector(const RVector&)>& field, RVector state,
                   double t_end, double dt) {
  double t = 0.0;
  while (t < t_end - 1e-12) {
    const double step = std::min(dt, t_end - t);
    const RVector k1 = field(state);
    const RVector k2 = field(state + 0.5 * step * k1);
    const RVector k3 = field(state + 0.5 * step * k2);
    const RVector k4 = field(state + step * k3);
    state += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += step;
  }
  return state;
}

}  // namespace oracles
