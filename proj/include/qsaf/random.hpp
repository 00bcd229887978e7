// Seeded random generators for states, tangents and unitaries. All draws go
// through one mt19937_64 stream so runs are reproducible from a single seed.

#pragma once

#include "qsaf/manifold.hpp"

#include <cstdint>
#include <numbers>
#include <random>

namespace qsaf {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniformInt(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform() * (static_cast<double>(hi - lo) + 1.0));
  }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  RVector normalVector(Eigen::Index n) {
    RVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Eigen::Vector3d normal3() {
    Eigen::Vector3d v;
    for (int i = 0; i < 3; ++i) v(i) = normal();
    return v;
  }

  CMatrix complexGaussian(Eigen::Index c) {
    CMatrix g(c, c);
    for (Eigen::Index i = 0; i < c; ++i)
      for (Eigen::Index j = 0; j < c; ++j) g(i, j) = Complex(normal(), normal());
    return g;
  }

  HermitianMatrix hermitian(Eigen::Index c, double scale = 1.0) {
    const CMatrix g = complexGaussian(c);
    return HermitianMatrix(CMatrix(0.5 * scale * (g + g.adjoint())));
  }

  TangentMatrix tangent(Eigen::Index c, double scale = 1.0) {
    return project_traceless(hermitian(c, scale));
  }

  /// Random interior state gamma(X) with a coordinate of the given spread.
  DensityMatrix density(Eigen::Index c, double spread = 1.0, double trace_scale = 1.0) {
    return gamma(tangent(c, spread), trace_scale);
  }

  /// Haar-like unitary from the QR decomposition of a complex Gaussian with
  /// the column phases fixed by the diagonal of R.
  CMatrix unitary(Eigen::Index c) {
    const CMatrix g = complexGaussian(c);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < c; ++j) {
      const Complex d = r(j, j);
      const double a = std::abs(d);
      if (a > 0.0) q.col(j) *= d / a;
    }
    return q;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace qsaf
