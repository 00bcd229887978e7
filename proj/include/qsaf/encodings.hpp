// Data-to-state encoders and decoders for the experiments: Bloch vectors,
// rank-one and Fourier-frame patch representations, commuting datasets and
// Gaussian patch weights.

#pragma once

#include "qsaf/graph.hpp"
#include "qsaf/manifold.hpp"

#include <numbers>
#include <vector>

namespace qsaf {

/// Real 3-vector of norm at most one parametrizing a 2x2 density matrix.
class BlochVector {
 public:
  explicit BlochVector(Eigen::Vector3d d) : d_(std::move(d)) {
    detail::require(d_.allFinite() && d_.norm() <= 1.0 + 1e-12,
                    "BlochVector: norm exceeds one");
  }
  BlochVector(double x, double y, double z) : BlochVector(Eigen::Vector3d(x, y, z)) {}

  const Eigen::Vector3d& vector() const { return d_; }
  double norm() const { return d_.norm(); }

 private:
  Eigen::Vector3d d_;
};

inline constexpr double kBlochBoundaryShrink = 1e-6;

/// rho = (I + d1 sx + d2 sy + d3 sz) / 2. Vectors at (or numerically beyond)
/// the unit sphere are shrunk to norm 1 - 1e-6 so the state stays strictly
/// positive definite.
inline DensityMatrix bloch_encode(const BlochVector& d) {
  Eigen::Vector3d v = d.vector();
  const double r = v.norm();
  const double rmax = 1.0 - kBlochBoundaryShrink;
  if (r > rmax) v *= rmax / r;
  CMatrix m(2, 2);
  m(0, 0) = Complex(1.0 + v.z(), 0.0);
  m(0, 1) = Complex(v.x(), -v.y());
  m(1, 0) = Complex(v.x(), v.y());
  m(1, 1) = Complex(1.0 - v.z(), 0.0);
  return DensityMatrix(HermitianMatrix(0.5 * m));
}

/// d_k = tr(rho s_k); exact left-inverse of bloch_encode away from the shrunk
/// boundary. ||d|| = 1 iff rho is pure.
inline BlochVector bloch_decode(const DensityMatrix& rho) {
  detail::require(rho.dim() == 2, "bloch_decode: two-dimensional states only");
  detail::require(std::abs(rho.traceScale() - 1.0) <= 1e-12,
                  "bloch_decode: unit trace required");
  const CMatrix& m = rho.matrix();
  const double x = 2.0 * m(1, 0).real();
  const double y = 2.0 * m(1, 0).imag();
  const double z = (m(0, 0) - m(1, 1)).real();
  Eigen::Vector3d d(x, y, z);
  // clip roundoff overshoot at pure states
  if (d.norm() > 1.0) d /= d.norm();
  return BlochVector(d);
}

/// Square patch stored in normalized form: the values have zero mean and unit
/// Frobenius norm whenever norm() > 0, while mean() and norm() retain the
/// affine parameters of the raw patch.
class Patch {
 public:
  Patch(Eigen::MatrixXd values, double mean, double norm)
      : values_(std::move(values)), mean_(mean), norm_(norm) {
    detail::require(values_.rows() == values_.cols() && values_.rows() >= 1,
                    "Patch: values must be square");
    detail::require(norm_ >= 0.0, "Patch: negative norm");
    if (norm_ > 0.0) {
      detail::require(std::abs(values_.mean()) <= 1e-9 &&
                          std::abs(values_.norm() - 1.0) <= 1e-9,
                      "Patch: stored values must have zero mean and unit norm");
    } else {
      detail::require(values_.norm() == 0.0, "Patch: zero-norm patch must be zero");
    }
  }

  static Patch FromRaw(const Eigen::MatrixXd& raw) {
    detail::require(raw.rows() == raw.cols() && raw.rows() >= 1,
                    "Patch: raw patch must be square");
    const double mean = raw.mean();
    Eigen::MatrixXd centered = (raw.array() - mean).matrix();
    const double norm = centered.norm();
    if (norm > 0.0) centered /= norm;
    return Patch(std::move(centered), mean, norm);
  }

  const Eigen::MatrixXd& values() const { return values_; }
  double mean() const { return mean_; }
  double norm() const { return norm_; }
  int side() const { return static_cast<int>(values_.rows()); }
  bool isZero() const { return norm_ == 0.0; }

  Eigen::MatrixXd raw() const {
    return ((values_ * norm_).array() + mean_).matrix();
  }

  double distanceTo(const Patch& other) const {
    return (values_ - other.values_).norm();
  }

 private:
  Eigen::MatrixXd values_;
  double mean_ = 0.0;
  double norm_ = 0.0;
};

/// Row-major vectorization (stacking the rows).
inline Eigen::VectorXd vec_rows(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd t = m.transpose();
  return Eigen::Map<const Eigen::VectorXd>(t.data(), t.size());
}

inline Eigen::MatrixXd unvec_rows(const Eigen::VectorXd& v, int rows, int cols) {
  detail::require(v.size() == static_cast<Eigen::Index>(rows) * cols,
                  "unvec_rows: size mismatch");
  const Eigen::Map<const Eigen::MatrixXd> t(v.data(), cols, rows);
  return t.transpose();
}

/// D = -v v^T with v the vectorized normalized patch; the negation makes the
/// single-vertex flow select the patch direction as the limiting pure state.
inline HermitianMatrix patch_rank_one_encode(const Patch& p) {
  detail::require(!p.isZero(), "patch_rank_one_encode: zero patch has no direction");
  const Eigen::VectorXd v = vec_rows(p.values());
  return HermitianMatrix(CMatrix(-(v * v.transpose()).cast<Complex>()));
}

/// Reshapes the top eigenvector of a near-pure state into a patch; the global
/// sign is chosen to minimize the distance to the reference patch.
inline Patch patch_rank_one_decode(const DensityMatrix& mu, const Patch& reference,
                                   double purity_tol = 1e-3) {
  detail::require(mu.dim() == static_cast<Eigen::Index>(reference.side()) * reference.side(),
                  "patch_rank_one_decode: dimension mismatch");
  if (mu.purityGap() > 10.0 * purity_tol)
    throw std::domain_error("patch_rank_one_decode: state is far from pure");
  const Eigen::VectorXcd top = mu.basis().col(mu.dim() - 1);
  Eigen::VectorXd v = top.real();
  if (v.norm() < 0.5) v = top.imag();  // eigenvector phase may be imaginary for real data
  const Eigen::VectorXd ref = vec_rows(reference.values());
  if (v.dot(ref) < 0.0) v = -v;
  Eigen::MatrixXd patch = unvec_rows(v, reference.side(), reference.side());
  // restore the stored form; residues are roundoff for states from real data
  patch.array() -= patch.mean();
  const double nrm = patch.norm();
  detail::require(nrm > 0.0, "patch_rank_one_decode: degenerate eigenvector");
  return Patch(patch / nrm, reference.mean(), reference.norm());
}

/// Unitary one-dimensional DFT matrix of size s.
inline CMatrix fourier_matrix(int s) {
  detail::require(s >= 1, "fourier_matrix: size must be positive");
  CMatrix f(s, s);
  const double scale = 1.0 / std::sqrt(static_cast<double>(s));
  for (int j = 0; j < s; ++j)
    for (int k = 0; k < s; ++k) {
      const double angle = -2.0 * std::numbers::pi * j * k / static_cast<double>(s);
      f(j, k) = scale * Complex(std::cos(angle), std::sin(angle));
    }
  return f;
}

/// Two-dimensional DFT F2 = F (x) F acting on row-major vectorized patches.
inline CMatrix fourier_matrix_2d(int s) {
  const CMatrix f = fourier_matrix(s);
  CMatrix f2(static_cast<Eigen::Index>(s) * s, static_cast<Eigen::Index>(s) * s);
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b)
      f2.block(static_cast<Eigen::Index>(a) * s, static_cast<Eigen::Index>(b) * s, s, s) =
          f(a, b) * f;
  return f2;
}

/// D = F2 Diag(-|p_hat|^2) F2^* with p_hat the 2D spectrum of the normalized
/// patch; Hermitian by construction, tr(-D) = 1 for nonzero patches.
inline HermitianMatrix fourier_frame_encode(const Patch& p) {
  const int s = p.side();
  const CMatrix f2 = fourier_matrix_2d(s);
  const Eigen::VectorXcd spectrum = f2 * vec_rows(p.values()).cast<Complex>();
  const RVector neg_power = -spectrum.cwiseAbs2();
  return HermitianMatrix(f2 * neg_power.cast<Complex>().asDiagonal() * f2.adjoint());
}

/// Reads the top eigenvector of a near-pure state in the Fourier basis and
/// uses its magnitudes as a multiplicative filter on the reference spectrum,
/// keeping the reference phase; the result is rescaled to the reference norm
/// and mean.
inline Patch fourier_frame_decode(const DensityMatrix& mu, const Patch& original,
                                  double purity_tol = 1e-3) {
  const int s = original.side();
  detail::require(mu.dim() == static_cast<Eigen::Index>(s) * s,
                  "fourier_frame_decode: dimension mismatch");
  if (mu.purityGap() > 10.0 * purity_tol)
    throw std::domain_error("fourier_frame_decode: state is far from pure");
  const CMatrix f2 = fourier_matrix_2d(s);
  const Eigen::VectorXcd top = mu.basis().col(mu.dim() - 1);
  const Eigen::VectorXcd in_fourier = f2.adjoint() * top;
  const Eigen::VectorXcd ref_spectrum = f2 * vec_rows(original.values()).cast<Complex>();

  Eigen::VectorXcd filtered(ref_spectrum.size());
  for (Eigen::Index k = 0; k < ref_spectrum.size(); ++k) {
    const double mag = std::abs(ref_spectrum(k));
    filtered(k) = (mag > 1e-12) ? std::abs(in_fourier(k)) * ref_spectrum(k) / mag
                                : Complex(0.0, 0.0);
  }
  const Eigen::VectorXd values = (f2.adjoint() * filtered).real();
  Eigen::MatrixXd patch = unvec_rows(values, s, s);
  patch.array() -= patch.mean();
  const double nrm = patch.norm();
  if (!(nrm > 0.0))
    throw std::runtime_error("fourier_frame_decode: filtered spectrum vanished");
  return Patch(patch / nrm, original.mean(), original.norm());
}

/// Per-vertex data matrices U Diag(lambda_i) U^*, pairwise commuting by
/// construction.
inline std::vector<HermitianMatrix> commuting_dataset(const CMatrix& u,
                                                      const std::vector<RVector>& lambdas) {
  const Eigen::Index c = u.rows();
  detail::require(u.cols() == c && c >= 1, "commuting_dataset: unitary must be square");
  detail::require((u.adjoint() * u - CMatrix::Identity(c, c)).norm() <=
                      1e-12 * static_cast<double>(c),
                  "commuting_dataset: matrix is not unitary");
  std::vector<HermitianMatrix> out;
  out.reserve(lambdas.size());
  for (const auto& lam : lambdas) {
    detail::require(lam.size() == c, "commuting_dataset: eigenvalue length mismatch");
    out.emplace_back(CMatrix(u * lam.cast<Complex>().asDiagonal() * u.adjoint()));
  }
  return out;
}

/// Row-normalized weights w_ik proportional to exp(-tau_w ||P_i - P_k||_F^2)
/// over the given neighborhoods. tau_w = 0 yields uniform weights.
inline WeightedGraph gaussian_patch_weights(const std::vector<Patch>& patches,
                                            const Neighborhoods& topology, double tau_w) {
  detail::require(tau_w >= 0.0, "gaussian_patch_weights: negative bandwidth");
  detail::require(patches.size() == topology.size(),
                  "gaussian_patch_weights: one patch per vertex required");
  std::vector<std::vector<double>> raw(topology.size());
  for (std::size_t i = 0; i < topology.size(); ++i) {
    raw[i].reserve(topology[i].size());
    for (int k : topology[i]) {
      const double d = patches[i].distanceTo(patches[static_cast<std::size_t>(k)]);
      raw[i].push_back(std::exp(-tau_w * d * d));
    }
  }
  return WeightedGraph::FromRawWeights(topology, raw);
}

}  // namespace qsaf
