// Complex Hermitian linear algebra: spectral decompositions, matrix
// exponential/logarithm, the traceless projection and the divided-difference
// operators attached to the BKM metric on density matrices.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace qsaf {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace detail

/// Hermitian c x c matrix. The constructor verifies the input is Hermitian up
/// to a small relative deviation and stores the exactly symmetrized form
/// (A + A*)/2, so downstream code may rely on entries[i][j] == conj(entries[j][i]).
class HermitianMatrix {
 public:
  explicit HermitianMatrix(CMatrix a, double tol = 1e-8) {
    detail::require(a.rows() == a.cols() && a.rows() >= 1,
                    "HermitianMatrix: matrix must be square and non-empty");
    detail::require(a.allFinite(), "HermitianMatrix: non-finite entries");
    const double dev = (a - a.adjoint()).norm();
    detail::require(dev <= tol * std::max(1.0, a.norm()),
                    "HermitianMatrix: input is not Hermitian (deviation " +
                        std::to_string(dev) + ")");
    m_ = 0.5 * (a + a.adjoint());
  }

  static HermitianMatrix Zero(Eigen::Index c) {
    return HermitianMatrix(CMatrix::Zero(c, c), Trusted{});
  }
  static HermitianMatrix Identity(Eigen::Index c) {
    return HermitianMatrix(CMatrix::Identity(c, c), Trusted{});
  }
  static HermitianMatrix FromDiagonal(const RVector& d) {
    return HermitianMatrix(d.cast<Complex>().asDiagonal().toDenseMatrix(), Trusted{});
  }

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double trace() const { return m_.trace().real(); }
  double norm() const { return m_.norm(); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    detail::require(a.dim() == b.dim(), "HermitianMatrix: dimension mismatch");
    return HermitianMatrix(a.m_ + b.m_, Trusted{});
  }
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
    detail::require(a.dim() == b.dim(), "HermitianMatrix: dimension mismatch");
    return HermitianMatrix(a.m_ - b.m_, Trusted{});
  }
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a) {
    return HermitianMatrix(s * a.m_, Trusted{});
  }
  friend HermitianMatrix operator-(const HermitianMatrix& a) {
    return HermitianMatrix(-a.m_, Trusted{});
  }

 protected:
  // Internal fast path for results that are Hermitian by construction.
  struct Trusted {};
  HermitianMatrix(CMatrix a, Trusted) : m_(std::move(a)) {}

 private:
  CMatrix m_;
};

/// Traceless Hermitian matrix, an element of the tangent space at any density
/// matrix. Construction fails if the trace is not numerically negligible.
class TangentMatrix : public HermitianMatrix {
 public:
  explicit TangentMatrix(HermitianMatrix m) : HermitianMatrix(std::move(m)) {
    const double bound = 1e-12 * static_cast<double>(dim()) * std::max(1.0, norm());
    detail::require(std::abs(trace()) <= bound,
                    "TangentMatrix: matrix is not traceless (trace " +
                        std::to_string(trace()) + ")");
  }

  static TangentMatrix Zero(Eigen::Index c) {
    return TangentMatrix(HermitianMatrix::Zero(c));
  }

  friend TangentMatrix operator+(const TangentMatrix& a, const TangentMatrix& b) {
    return TangentMatrix(static_cast<const HermitianMatrix&>(a) +
                         static_cast<const HermitianMatrix&>(b));
  }
  friend TangentMatrix operator-(const TangentMatrix& a, const TangentMatrix& b) {
    return TangentMatrix(static_cast<const HermitianMatrix&>(a) -
                         static_cast<const HermitianMatrix&>(b));
  }
  friend TangentMatrix operator*(double s, const TangentMatrix& a) {
    return TangentMatrix(s * static_cast<const HermitianMatrix&>(a));
  }
  friend TangentMatrix operator-(const TangentMatrix& a) {
    return TangentMatrix(-static_cast<const HermitianMatrix&>(a));
  }
};

/// Eigensystem of a Hermitian matrix: eigenvalues in ascending order and the
/// unitary matrix of eigenvectors as columns.
struct SpectralDecomposition {
  RVector eigenvalues;
  CMatrix eigenvectors;

  CMatrix reconstruct() const {
    return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() *
           eigenvectors.adjoint();
  }
};

inline SpectralDecomposition spectral_decompose(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_decompose: eigensolver did not converge");
  return SpectralDecomposition{es.eigenvalues(), es.eigenvectors()};
}

/// tr(AB), real for Hermitian arguments. The imaginary residue is checked
/// before being discarded.
inline double frobenius_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
  detail::require(a.dim() == b.dim(), "frobenius_inner: dimension mismatch");
  // tr(AB) = sum_ij A_ij conj(B_ij) for Hermitian B.
  const Complex v = (a.matrix().array() * b.matrix().array().conjugate()).sum();
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, a.norm() * b.norm()))
    throw std::runtime_error("frobenius_inner: unexpected imaginary part");
  return v.real();
}

namespace detail {

inline CMatrix map_eigenvalues(const SpectralDecomposition& sd, const RVector& mapped) {
  return sd.eigenvectors * mapped.cast<Complex>().asDiagonal() * sd.eigenvectors.adjoint();
}

}  // namespace detail

inline HermitianMatrix matrix_exp(const HermitianMatrix& a) {
  const auto sd = spectral_decompose(a);
  return HermitianMatrix(detail::map_eigenvalues(sd, sd.eigenvalues.array().exp().matrix()));
}

inline HermitianMatrix matrix_log(const HermitianMatrix& p) {
  const auto sd = spectral_decompose(p);
  if (sd.eigenvalues.minCoeff() <= 0.0)
    throw std::domain_error("matrix_log: matrix is not positive definite");
  return HermitianMatrix(detail::map_eigenvalues(sd, sd.eigenvalues.array().log().matrix()));
}

/// Orthogonal projection onto traceless Hermitian matrices, A - (tr A / c) I.
inline TangentMatrix project_traceless(const HermitianMatrix& a) {
  const double shift = a.trace() / static_cast<double>(a.dim());
  CMatrix out = a.matrix();
  out.diagonal().array() -= Complex(shift, 0.0);
  return TangentMatrix(HermitianMatrix(std::move(out)));
}

/// Logarithmic mean (x - y) / (log x - log y), continued by its limit value on
/// the diagonal. Near-equal arguments use the expansion
/// sqrt(xy) * (1 + u^2/24 + u^4/1920), u = log(x/y), to avoid 0/0 cancellation.
inline double log_mean(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0))
    throw std::domain_error("log_mean: arguments must be positive");
  if (x == y) return x;
  const double hi = std::max(x, y), lo = std::min(x, y);
  // log hi - log lo evaluated as log1p((hi - lo)/lo) to dodge cancellation;
  // ordering the arguments keeps the result exactly symmetric
  const double u = std::log1p((hi - lo) / lo);
  if (hi - lo > 1e-8 * hi) return (hi - lo) / u;
  const double u2 = u * u;
  return std::sqrt(hi * lo) * (1.0 + u2 / 24.0 + u2 * u2 / 1920.0);
}

class DensityMatrix;
DensityMatrix gamma(const HermitianMatrix& z, double trace_scale);

/// Strictly positive definite Hermitian matrix with fixed trace tau. The
/// eigensystem is computed on construction and cached, since every metric
/// operation works in the eigenbasis.
class DensityMatrix {
 public:
  explicit DensityMatrix(const HermitianMatrix& m, double trace_scale = 1.0) {
    detail::require(trace_scale > 0.0, "DensityMatrix: trace scale must be positive");
    auto sd = spectral_decompose(m);
    if (sd.eigenvalues.minCoeff() < kEigFloor * trace_scale)
      throw std::domain_error("DensityMatrix: matrix is not strictly positive definite");
    detail::require(std::abs(sd.eigenvalues.sum() - trace_scale) <= 1e-10 * trace_scale,
                    "DensityMatrix: trace differs from the prescribed scale");
    eigenvalues_ = std::move(sd.eigenvalues);
    basis_ = std::move(sd.eigenvectors);
    trace_scale_ = trace_scale;
    matrix_ = m.matrix();
  }

  static DensityMatrix Barycenter(Eigen::Index c, double trace_scale = 1.0) {
    return DensityMatrix(RVector::Constant(c, trace_scale / static_cast<double>(c)),
                         CMatrix::Identity(c, c), trace_scale);
  }

  Eigen::Index dim() const { return matrix_.rows(); }
  double traceScale() const { return trace_scale_; }
  const CMatrix& matrix() const { return matrix_; }
  /// Eigenvalues in ascending order.
  const RVector& eigenvalues() const { return eigenvalues_; }
  /// Unitary eigenbasis, columns aligned with eigenvalues().
  const CMatrix& basis() const { return basis_; }

  HermitianMatrix hermitian() const { return HermitianMatrix(matrix_); }
  double norm() const { return matrix_.norm(); }

  /// (tr rho)^2 - tr(rho^2); zero exactly at rank-one states, maximal
  /// tau^2 (1 - 1/c) at the barycenter.
  double purityGap() const {
    const double t = eigenvalues_.sum();
    return t * t - eigenvalues_.squaredNorm();
  }

  static constexpr double kEigFloor = 1e-14;

 private:
  // Trusted spectral constructor; callers guarantee orthonormal columns. The
  // chart keeps interior points representable far beyond the raw-matrix
  // eigenvalue floor, so only true underflow to zero is rejected here.
  DensityMatrix(RVector evals, CMatrix evecs, double trace_scale)
      : eigenvalues_(std::move(evals)), basis_(std::move(evecs)),
        trace_scale_(trace_scale) {
    if (!(eigenvalues_.minCoeff() > 0.0))
      throw std::domain_error("DensityMatrix: state reached the numerical boundary");
    CMatrix m = basis_ * eigenvalues_.cast<Complex>().asDiagonal() * basis_.adjoint();
    matrix_ = 0.5 * (m + m.adjoint());
  }

  friend DensityMatrix gamma(const HermitianMatrix& z, double trace_scale);

  RVector eigenvalues_;
  CMatrix basis_;
  double trace_scale_ = 1.0;
  CMatrix matrix_;
};

inline HermitianMatrix matrix_log(const DensityMatrix& rho) {
  return HermitianMatrix(detail::map_eigenvalues(
      SpectralDecomposition{rho.eigenvalues(), rho.basis()},
      rho.eigenvalues().array().log().matrix()));
}

inline double frobenius_inner(const DensityMatrix& rho, const HermitianMatrix& x) {
  detail::require(rho.dim() == x.dim(), "frobenius_inner: dimension mismatch");
  const Complex v = (rho.matrix().array() * x.matrix().array().conjugate()).sum();
  return v.real();
}

namespace detail {

enum class DividedDifference { kDivide, kMultiply };

inline HermitianMatrix divided_difference_transform(const DensityMatrix& rho,
                                                    const HermitianMatrix& x,
                                                    DividedDifference mode) {
  require(rho.dim() == x.dim(), "tmap: dimension mismatch");
  const CMatrix& u = rho.basis();
  const RVector& lam = rho.eigenvalues();
  CMatrix xt = u.adjoint() * x.matrix() * u;
  const Eigen::Index c = rho.dim();
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      const double m = log_mean(lam(i), lam(j));
      xt(i, j) = (mode == DividedDifference::kDivide) ? xt(i, j) / m : xt(i, j) * m;
    }
  }
  return HermitianMatrix(u * xt * u.adjoint());
}

}  // namespace detail

/// Differential of the matrix logarithm at rho, applied to X. In the
/// eigenbasis of rho the entries are divided by the logarithmic mean of the
/// eigenvalue pair.
inline HermitianMatrix tmap(const DensityMatrix& rho, const HermitianMatrix& x) {
  return detail::divided_difference_transform(rho, x, detail::DividedDifference::kDivide);
}

/// Inverse of tmap: differential of the matrix exponential, equal to the
/// integral of rho^{1-s} X rho^s over s in [0,1]. Satisfies
/// tr(tmap_inv(rho, X)) = tr(rho X) and tmap_inv(rho, I) = rho.
inline HermitianMatrix tmap_inv(const DensityMatrix& rho, const HermitianMatrix& x) {
  return detail::divided_difference_transform(rho, x, detail::DividedDifference::kMultiply);
}

/// BKM metric g_rho(X, Y) = <tmap(rho, X), Y>.
inline double bkm_metric(const DensityMatrix& rho, const TangentMatrix& x,
                         const TangentMatrix& y) {
  return frobenius_inner(tmap(rho, x), y);
}

}  // namespace qsaf
