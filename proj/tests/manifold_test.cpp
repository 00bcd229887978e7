#include "qsaf/manifold.hpp"
#include "qsaf/random.hpp"
#include "qsaf/simplex.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace qsaf;

namespace {

TEST(Gamma, BarycenterShiftInvarianceDiagonal) {
  const auto rho0 = gamma(HermitianMatrix::Zero(4));
  EXPECT_LE((rho0.matrix() - CMatrix::Identity(4, 4) / 4.0).norm(), 1e-14);

  Rng rng(31);
  const auto z = rng.hermitian(4);
  for (const double alpha : {-3.0, 0.7, 25.0}) {
    const auto shifted = gamma(z + alpha * HermitianMatrix::Identity(4));
    EXPECT_LE((shifted.matrix() - gamma(z).matrix()).norm(), 1e-12);
  }

  const Eigen::Vector3d v(0.3, -1.0, 2.0);
  const auto diag = gamma(HermitianMatrix::FromDiagonal(v));
  const RVector expected = simplex::softmax(v);
  // softmax of the diagonal, returned in ascending spectral order
  RVector sorted = expected;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_LE((diag.eigenvalues() - sorted).norm(), 1e-13);
  EXPECT_THROW(gamma(HermitianMatrix::Zero(3), -1.0), std::invalid_argument);
}

TEST(Gamma, InverseRoundTripsBothOrders) {
  Rng rng(32);
  for (int rep = 0; rep < 10; ++rep) {
    const auto x = rng.tangent(5);
    const auto rho = gamma(x);
    EXPECT_LE((gamma_inv(rho) - x).norm(), 1e-10 * std::max(1.0, x.norm()));

    const auto sigma = rng.density(5);
    EXPECT_LE((gamma(gamma_inv(sigma)).matrix() - sigma.matrix()).norm(), 1e-10);
  }
  EXPECT_LE(gamma_inv(DensityMatrix::Barycenter(6)).norm(), 1e-13);
}

TEST(Gamma, DiagonalInverseMatchesScalarFormula) {
  const Eigen::Vector3d lam(0.2, 0.3, 0.5);
  const DensityMatrix rho(HermitianMatrix::FromDiagonal(lam));
  const RVector logs = lam.array().log().matrix();
  const RVector expected = (logs.array() - logs.mean()).matrix();
  EXPECT_LE((gamma_inv(rho).matrix().diagonal().real() - expected).norm(), 1e-12);
}

TEST(Gamma, TraceScaleGeneralization) {
  Rng rng(33);
  const double tau = 4.0;
  const auto x = rng.tangent(3);
  const auto rho = gamma(x, tau);
  EXPECT_NEAR(rho.eigenvalues().sum(), tau, 1e-10 * tau);
  EXPECT_LE((gamma_inv(rho) - x).norm(), 1e-10 * std::max(1.0, x.norm()));

  const auto mu = rng.density(3, 0.8, tau);
  const auto back = gamma(gamma_inv(mu), tau);
  EXPECT_LE((back.matrix() - mu.matrix()).norm(), 1e-10 * tau);
}

TEST(GammaCoordinate, HoldsValueAndPsi) {
  Rng rng(34);
  const auto x = rng.tangent(4);
  const GammaCoordinate coord(x);
  EXPECT_LE((coord.value() - x).norm(), 0.0);
  // psi equals log tr exp computed spectrally
  const auto sd = spectral_decompose(x);
  EXPECT_NEAR(coord.psi(), std::log(sd.eigenvalues.array().exp().sum()), 1e-12);
  EXPECT_LE((coord.state().matrix() - gamma(x).matrix()).norm(), 1e-14);
  // overflow-safe for large coordinates
  const GammaCoordinate big(TangentMatrix(
      HermitianMatrix::FromDiagonal(Eigen::Vector2d(900.0, -900.0))));
  EXPECT_NEAR(big.psi(), 900.0, 1e-9);
}

TEST(DGamma, BarycenterAndFiniteDifferences) {
  Rng rng(35);
  const int c = 4;
  const auto y = rng.tangent(c);
  // at the chart origin the differential is division by c
  EXPECT_LE((dgamma(TangentMatrix::Zero(c), y) - (1.0 / c) * y).norm(), 1e-12);

  for (int rep = 0; rep < 5; ++rep) {
    const auto h = rng.tangent(c, 0.4);
    const auto dir = rng.tangent(c, 0.4);
    const CMatrix fd = oracles::central_difference(
        [&](double t) {
          return gamma(HermitianMatrix(CMatrix(h.matrix() + t * dir.matrix()))).matrix();
        },
        1e-5);
    const auto lib = dgamma(h, dir);
    EXPECT_LE((lib.matrix() - fd).norm(), 1e-5 * std::max(1.0, fd.norm()));
  }
}

TEST(DGammaInv, BarycenterFiniteDifferencesAndInverse) {
  Rng rng(36);
  const int c = 4;
  const auto x = rng.tangent(c);
  EXPECT_LE((dgamma_inv(DensityMatrix::Barycenter(c), x) - static_cast<double>(c) * x).norm(),
            1e-10);

  for (int rep = 0; rep < 5; ++rep) {
    const auto rho = rng.density(c, 0.4);
    const auto dir = rng.tangent(c, 0.2);
    const CMatrix fd = oracles::central_difference(
        [&](double t) {
          return gamma_inv(DensityMatrix(
                               HermitianMatrix(CMatrix(rho.matrix() + t * dir.matrix()))))
              .matrix();
        },
        1e-5);
    const auto lib = dgamma_inv(rho, dir);
    EXPECT_LE((lib.matrix() - fd).norm(), 1e-5 * std::max(1.0, fd.norm()));

    // mutually inverse linear maps on the tangent space
    const auto y = rng.tangent(c);
    const auto h = gamma_inv(rho);
    EXPECT_LE((dgamma_inv(rho, dgamma(h, y)) - y).norm(), 1e-9 * std::max(1.0, y.norm()));
    EXPECT_LE((dgamma(h, dgamma_inv(rho, y)) - y).norm(), 1e-9 * std::max(1.0, y.norm()));
  }
}

TEST(Replicator, IdentityKernelBarycenterCommutation) {
  Rng rng(37);
  const int c = 4;
  const auto rho = rng.density(c);
  // the identity is in the kernel
  EXPECT_LE(replicator(rho, HermitianMatrix::Identity(c)).norm(), 1e-12);

  const auto x = rng.tangent(c);
  EXPECT_LE((replicator(DensityMatrix::Barycenter(c), x) - (1.0 / c) * x).norm(), 1e-12);

  for (int rep = 0; rep < 10; ++rep) {
    const auto a = rng.hermitian(c);
    const auto direct = replicator(rho, a);
    const auto projected = replicator(rho, project_traceless(a));
    EXPECT_LE((direct - projected).norm(), 1e-12 * std::max(1.0, a.norm()));
    EXPECT_LE((project_traceless(direct) - direct).norm(), 1e-12 * std::max(1.0, a.norm()));
    EXPECT_LE(std::abs(direct.trace()), 1e-12 * std::max(1.0, a.norm()));
  }
}

TEST(RiemannianGrad, LinearQuadraticFunctionals) {
  Rng rng(38);
  const int c = 4;
  for (int rep = 0; rep < 5; ++rep) {
    const auto rho = rng.density(c, 0.6);

    // f = tr(rho): gradient of a constant on the manifold vanishes
    EXPECT_LE(riemannian_grad(rho, HermitianMatrix::Identity(c)).norm(), 1e-12);

    // metric pairing g(grad f, Y) = <df, Y> for traceless Y
    const auto y = rng.tangent(c);

    // quadratic f = 0.5 ||rho||^2, df = rho
    const auto grad_quad = riemannian_grad(rho, rho.hermitian());
    EXPECT_NEAR(bkm_metric(rho, grad_quad, y), frobenius_inner(rho.hermitian(), y), 1e-8);

    // linear f = <C, rho>
    const auto cmat = rng.hermitian(c);
    const auto grad_lin = riemannian_grad(rho, cmat);
    EXPECT_NEAR(bkm_metric(rho, grad_lin, y), frobenius_inner(cmat, y), 1e-8);
  }
}

TEST(ExpE, IdentityVelocityRoundTrip) {
  Rng rng(39);
  const int c = 4;
  for (int rep = 0; rep < 5; ++rep) {
    const auto rho = rng.density(c, 0.6);
    EXPECT_LE((exp_e(rho, TangentMatrix::Zero(c)).matrix() - rho.matrix()).norm(), 1e-12);

    // velocity at t = 0
    const auto x = rng.tangent(c, 0.5);
    const double h = 1e-6;
    const CMatrix vel =
        (exp_e(rho, TangentMatrix(h * x)).matrix() - exp_e(rho, TangentMatrix(-h * x)).matrix()) /
        (2.0 * h);
    EXPECT_LE((vel - x.matrix()).norm(), 1e-4 * std::max(1.0, x.norm()));

    // round trip with the inverse map
    const auto mu = rng.density(c, 0.6);
    EXPECT_LE((exp_e(rho, exp_e_inv(rho, mu)).matrix() - mu.matrix()).norm(), 1e-9);
    EXPECT_LE(exp_e_inv(rho, rho).norm(), 1e-12);
    EXPECT_LE((exp_e_inv(rho, exp_e(rho, x)) - x).norm(), 1e-9 * std::max(1.0, x.norm()));
  }
}

TEST(ExpE, GeodesicAffineInCoordinates) {
  Rng rng(40);
  const auto rho = rng.density(3, 0.5);
  const auto x = rng.tangent(3, 0.7);
  const auto base = gamma_inv(rho);
  const auto step = dgamma_inv(rho, x);
  for (const double t : {0.25, 1.0, 2.5}) {
    const auto on_curve = exp_e(rho, TangentMatrix(t * x));
    const auto expected = gamma(base + t * step);
    EXPECT_LE((on_curve.matrix() - expected.matrix()).norm(), 1e-10);
  }
}

TEST(ExpE, CommutingPairReducesToSimplexFormula) {
  // diagonal states evolve exactly like their eigenvalue vectors
  const Eigen::Vector3d p(0.5, 0.2, 0.3);
  const Eigen::Vector3d q(0.1, 0.6, 0.3);
  const DensityMatrix rho(HermitianMatrix::FromDiagonal(p));
  const DensityMatrix mu(HermitianMatrix::FromDiagonal(q));
  const auto x = exp_e_inv(rho, mu);
  const auto expected =
      simplex::exp_e_inv(simplex::SimplexPoint(p), simplex::SimplexPoint(q));
  EXPECT_LE((x.matrix().diagonal().real() - expected.vector()).norm(), 1e-10);
  EXPECT_LE(x.matrix().imag().norm(), 1e-12);
}

TEST(LiftExp, ChartFormulaAndExpEComposition) {
  Rng rng(41);
  const int c = 4;
  for (int rep = 0; rep < 5; ++rep) {
    const auto rho = rng.density(c, 0.6);
    const auto x = rng.tangent(c, 0.6);
    EXPECT_LE((lift_exp(rho, TangentMatrix::Zero(c)).matrix() - rho.matrix()).norm(), 1e-12);
    EXPECT_LE((lift_exp(DensityMatrix::Barycenter(c), x).matrix() - gamma(x).matrix()).norm(),
              1e-12);
    // lift = exp_e composed with the replicator map
    const auto composed = exp_e(rho, replicator(rho, x));
    EXPECT_LE((lift_exp(rho, x).matrix() - composed.matrix()).norm(), 1e-10);
  }
}

TEST(LiftExp, DifferentialIsReplicatorAtTarget) {
  Rng rng(42);
  const auto rho = rng.density(3, 0.4);
  const auto x = rng.tangent(3, 0.4);
  const auto y = rng.tangent(3, 0.4);
  const CMatrix fd = oracles::central_difference(
      [&](double t) {
        return lift_exp(rho, TangentMatrix(HermitianMatrix(
                                 CMatrix(x.matrix() + t * y.matrix()))))
            .matrix();
      },
      1e-5);
  const auto expected = replicator(lift_exp(rho, x), y);
  EXPECT_LE((expected.matrix() - fd).norm(), 1e-5 * std::max(1.0, fd.norm()));
}

TEST(Likelihood, ShiftInvarianceAndCommutingCase) {
  Rng rng(43);
  const auto rho = rng.density(4, 0.5);

  // multiples of the identity do not move the state
  const auto same = likelihood(rho, HermitianMatrix(CMatrix(0.7 * CMatrix::Identity(4, 4))));
  EXPECT_LE((same.matrix() - rho.matrix()).norm(), 1e-12);

  const auto lik = likelihood(rho, rng.hermitian(4));
  EXPECT_NEAR(lik.eigenvalues().sum(), 1.0, 1e-10);
  EXPECT_GT(lik.eigenvalues().minCoeff(), 0.0);

  // commuting case c = 3: eigenvalues follow the simplex likelihood
  const Eigen::Vector3d lam_d(1.0, 2.0, 3.0);
  const auto lik_diag = likelihood(DensityMatrix::Barycenter(3),
                                   HermitianMatrix::FromDiagonal(lam_d));
  RVector expected = simplex::softmax(-lam_d);
  std::sort(expected.begin(), expected.end());
  EXPECT_LE((lik_diag.eigenvalues() - expected).norm(), 1e-12);
}

TEST(LogEuclideanExp, FixedPointAndScalarCase) {
  Rng rng(44);
  const auto rho = rng.density(3, 0.5);
  EXPECT_LE((log_euclidean_exp(rho, HermitianMatrix::Zero(3)).matrix() - rho.matrix()).norm(),
            1e-12);

  // commuting diagonal case: entrywise lambda * exp(y / lambda)
  const Eigen::Vector3d lam(0.2, 0.3, 0.5);
  const Eigen::Vector3d y(0.05, -0.02, 0.1);
  const DensityMatrix diag(HermitianMatrix::FromDiagonal(lam));
  const auto lifted = log_euclidean_exp(diag, HermitianMatrix::FromDiagonal(y));
  const Eigen::Vector3d expected =
      (lam.array() * (y.array() / lam.array()).exp()).matrix();
  EXPECT_LE((lifted.matrix().diagonal().real() - expected).norm(), 1e-10);
}

TEST(LogEuclideanExp, MatchesExpEUnderPsiShift) {
  Rng rng(45);
  for (int rep = 0; rep < 10; ++rep) {
    const auto rho = rng.density(4, 0.7);
    const auto x = rng.tangent(4, 0.7);
    const HermitianMatrix inner = matrix_log(rho) + tmap(rho, x);
    const HermitianMatrix y = x - psi(inner) * rho.hermitian();
    const auto via_log_euclidean = log_euclidean_exp(rho, y);
    const auto via_e_geodesic = exp_e(rho, x);
    EXPECT_LE((via_log_euclidean.matrix() - via_e_geodesic.matrix()).norm(), 1e-10);
  }
}

}  // namespace
