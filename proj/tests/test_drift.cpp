#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "mcbound/drift.hpp"
#include "mcbound/errors.hpp"
#include "mcbound/monotone.hpp"
#include "fixtures.hpp"

using namespace mcbound;
using fixture::walk;
using fixture::walk_cert;

namespace {

// E_x[sigma_C] for C = {0..x0} by a direct linear solve.
std::vector<double> hitting_means(const DiscreteKernel& k, std::size_t x0) {
  const std::size_t n = k.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (std::size_t x = x0 + 1; x < n; ++x) {
    for (std::size_t y = x0 + 1; y < n; ++y) a(x, y) -= k(x, y);
    b(x) = 1.0;
  }
  const Eigen::VectorXd h = a.partialPivLu().solve(b);
  return {h.data(), h.data() + n};
}

}  // namespace

TEST(ResidualMeanBound, Cases) {
  EXPECT_DOUBLE_EQ(residual_mean_bound(5.0, 3.0, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(residual_mean_bound(5.0, 2.0, 0.5), (5.0 - 1.0) / 0.5);
  EXPECT_THROW(residual_mean_bound(1.0, 4.0, 0.5), CertificateError);
  EXPECT_THROW(residual_mean_bound(1.0, 1.0, 0.0), CertificateError);
}

TEST(Lambda, AdmissibleIntervalAndRejection) {
  auto c = fixture::lambda_cert();
  const auto [lo, hi] = admissible_lambda(c);
  EXPECT_EQ(lo, 0.0);
  EXPECT_DOUBLE_EQ(hi, 0.75);
  EXPECT_DOUBLE_EQ(default_lambda(c), 0.375);

  const auto biv = bivariate_from_univariate(c);
  EXPECT_DOUBLE_EQ(biv.sup_pw_on_cc, 2.0 * residual_mean_bound(3.0, 2.0, 0.5) - 1.0);
  EXPECT_DOUBLE_EQ(biv.w(3.0, 5.0), 4.0 + 6.0 - 1.0);
  EXPECT_NEAR(biv.phi(9.0), 0.375 * 6.0, 1e-14);

  for (double bad : {0.0, -0.1, 0.75, 0.9}) {
    try {
      bivariate_from_univariate(c, bad);
      FAIL() << "lambda=" << bad << " accepted";
    } catch (const ConfigurationError& e) {
      EXPECT_EQ(e.invariant(), "lambda in (0, 1 - b0/phi0(d0))");
    }
  }
  c.b0 = 5.0;
  EXPECT_THROW(admissible_lambda(c), CertificateError);
}

TEST(MonotoneDrift, UBoundsExactHittingTimes) {
  const auto k = walk(40);
  const std::size_t x0 = 2;
  const auto cert = walk_cert(k, x0, 5.0);
  const auto cm = moments_from_monotone_drift(cert, &k);
  const auto h = hitting_means(k, x0);
  for (std::size_t x = 0; x < k.size(); ++x) {
    const double u = cm.moments.u_fn(static_cast<double>(x), 0.0);
    EXPECT_GE(u + 1e-9, h[x] + 1.0) << "x=" << x;
  }
  // Linear drift with exact decrement: the bound is tight away from the
  // reflecting boundary.
  EXPECT_NEAR(cm.moments.u_fn(10.0, 0.0), h[10] + 1.0, 1e-3);
  EXPECT_DOUBLE_EQ(cm.epsilon, 0.2);
  // b_U = 1 + (residual mean of W0 - 1) with slope 1.
  EXPECT_NEAR(cm.moments.b_u, residual_mean_bound(cert.sup_pw0_on_c, cert.nu_w0, 0.2), 1e-12);
}

TEST(MonotoneDrift, JoinLiftsToPairs) {
  const auto k = walk(20);
  const auto cm = moments_from_monotone_drift(walk_cert(k, 2, 5.0), &k);
  EXPECT_EQ(cm.moments.u_fn(7.0, 3.0), cm.moments.u_fn(3.0, 7.0));
  EXPECT_EQ(cm.moments.u_fn(7.0, 3.0), cm.moments.u_fn(7.0, 7.0));
  EXPECT_EQ(cm.moments.u_fn(1.0, 2.0), 1.0);
}

TEST(MonotoneDrift, TooWeakDriftIsRejected) {
  const auto k = walk(20);
  // Slope 4 gives PW0 - W0 = -0.8 > -1 off C.
  const auto cert = walk_cert(k, 2, 4.0);
  EXPECT_GT(check_drift_on_kernel(k, cert).worst_excess, 0.0);
  try {
    moments_from_monotone_drift(cert, &k);
    FAIL() << "weak drift accepted";
  } catch (const CertificateError& e) {
    EXPECT_EQ(e.invariant(), "drift PW0 <= W0 - phi0(W0) + b0 1_C");
  }
}

TEST(MonotoneDrift, EpsilonZeroIsRejected) {
  const auto k = walk(20);
  auto cert = walk_cert(k, 2, 5.0);
  cert.small_set.epsilon = 0.0;
  try {
    moments_from_monotone_drift(cert, &k);
    FAIL() << "eps = 0 accepted";
  } catch (const CertificateError& e) {
    EXPECT_EQ(e.invariant(), "epsilon in (0, 1]");
  }
}

TEST(BivariateDrift, MomentsFromPolynomialDrift) {
  BivariateDriftCert c;
  c.w = [](double x, double xp) { return 1.0 + x + xp; };
  c.phi = PhiGenerator::polynomial(1.0, 2.0);
  c.in_cc = [](double x, double xp) { return x + xp < 1.0; };
  c.epsilon = 0.5;
  c.sup_pw_on_cc = 3.0;
  c.sup_phi_w_on_cc = 1.0;
  const auto cm = moments_from_bivariate_drift(c);
  // r(1) / phi(1) = (1 + 1/2) / 1.
  EXPECT_DOUBLE_EQ(cm.slope, 1.5);
  EXPECT_DOUBLE_EQ(cm.moments.u_fn(2.0, 1.0), 1.0 + 1.5 * 3.0);
  EXPECT_DOUBLE_EQ(cm.moments.u_fn(0.1, 0.2), 1.0);
  EXPECT_DOUBLE_EQ(cm.moments.b_u, 1.0 + 1.5 * 2.0);
  EXPECT_DOUBLE_EQ(cm.moments.b_v, 4.0);
}
