#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

#include "mcbound/drift.hpp"
#include "mcbound/errors.hpp"
#include "mcbound/mg1.hpp"
#include "mcbound/monotone.hpp"
#include "mcbound/verify.hpp"
#include "oracles.hpp"

using namespace mcbound;

namespace {

constexpr double kAlpha = 2.5;

double poisson(std::size_t j, double m) {
  const double jd = static_cast<double>(j);
  return std::exp(-m + jd * std::log(m) - std::lgamma(jd + 1.0));
}

// a_j by Simpson: [0, B] directly, (B, inf) through t = B / s.
double a_oracle(std::size_t j, double lam, double b, double alpha) {
  const double head = oracle::simpson(
      [&](double t) { return t == 0.0 ? (j == 0 ? alpha / b : 0.0) : poisson(j, lam * t) * (alpha / b) * std::exp(-alpha * t / b); },
      0.0, b, 40000);
  const double tail = oracle::simpson(
      [&](double s) {
        if (s <= 0.0) return 0.0;
        const double t = b / s;
        return poisson(j, lam * t) * mg1::service_density(t, b, alpha) * b / (s * s);
      },
      0.0, 1.0, 40000);
  return head + tail;
}

const mg1::EmbeddedChain& chain_half() {
  static const mg1::EmbeddedChain c = mg1::embedded_matrix(mg1::Config::from_traffic(0.5, kAlpha));
  return c;
}

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

TEST(ServiceLaw, MeanClosedFormAndQuadrature) {
  EXPECT_NEAR(mg1::service_moment_m1(1.0, kAlpha), 0.42188933296637301, 1e-15);
  const double head = oracle::simpson([](double t) { return t * mg1::service_density(t, 1.0, kAlpha); }, 0.0, 1.0);
  // t = 1 / w^2 turns the sqrt-type endpoint behaviour of the tail into a
  // smooth integrand.
  const double tail = oracle::simpson(
      [](double w) {
        if (w <= 0.0) return 0.0;
        const double t = 1.0 / (w * w);
        return t * mg1::service_density(t, 1.0, kAlpha) * 2.0 / (w * w * w);
      },
      0.0, 1.0);
  EXPECT_NEAR(head + tail, 0.42188933296637301, 1e-9);
}

TEST(ServiceLaw, DensityIntegratesToOne) {
  for (double b : {0.5, 1.0, 3.0}) {
    const double head = oracle::simpson([&](double t) { return mg1::service_density(t, b, kAlpha); }, 0.0, b);
    const double tail = oracle::simpson(
        [&](double s) { return s <= 0.0 ? 0.0 : mg1::service_density(b / s, b, kAlpha) * b / (s * s); }, 0.0, 1.0);
    EXPECT_NEAR(head + tail, 1.0, 1e-10) << "B=" << b;
  }
}

TEST(ServiceLaw, InfiniteMeanIsADomainError) {
  EXPECT_THROW(mg1::service_moment_m1(1.0, 1.0), DomainError);
  EXPECT_THROW(mg1::Config::from_traffic(0.5, 0.9), DomainError);
}

TEST(Config, TrafficBounds) {
  EXPECT_THROW(mg1::Config::from_traffic(1.0, kAlpha), ConfigurationError);
  EXPECT_THROW(mg1::Config::from_traffic(0.0, kAlpha), ConfigurationError);
  const auto cfg = mg1::Config::from_traffic(0.9, kAlpha);
  EXPECT_NEAR(cfg.traffic(), 0.9, 1e-15);
  EXPECT_NEAR(cfg.lambda_arrival, 0.9 / 0.42188933296637301, 1e-12);
  EXPECT_EQ(cfg.truncation, 800u);
}

TEST(Arrivals, MatchSimpsonOracle) {
  const auto cfg = mg1::Config::from_traffic(0.5, kAlpha);
  const auto a = mg1::arrival_probabilities(cfg, 41);
  for (std::size_t j : {0u, 1u, 2u, 5u, 12u, 40u}) {
    const double ref = a_oracle(j, cfg.lambda_arrival, 1.0, kAlpha);
    EXPECT_NEAR(a[j], ref, 1e-10 + 1e-8 * ref) << "j=" << j;
  }
}

TEST(Arrivals, MassAndMeanWithPowerTail) {
  // For large j, a_j ~ alpha e^-alpha lambda^alpha j^(-alpha-1), so the
  // missing parts of sum a_j and sum j a_j beyond N have closed forms.
  for (double rho : {0.5, 0.9}) {
    const auto cfg = mg1::Config::from_traffic(rho, kAlpha);
    const std::size_t n = 2000;
    const auto a = mg1::arrival_probabilities(cfg, n);
    const double c = kAlpha * std::exp(-kAlpha) * std::pow(cfg.lambda_arrival, kAlpha);
    const double nd = static_cast<double>(n) - 0.5;
    double mass = 0.0, mean = 0.0, shifted = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      mass += a[j];
      mean += static_cast<double>(j) * a[j];
      if (j >= 2) shifted += (static_cast<double>(j) - 1.0) * a[j];
    }
    mass += c * std::pow(nd, -kAlpha) / kAlpha;
    const double mean_tail = c * std::pow(nd, 1.0 - kAlpha) / (kAlpha - 1.0);
    mean += mean_tail;
    shifted += mean_tail;
    EXPECT_NEAR(mass, 1.0, 1e-8) << "rho=" << rho;
    EXPECT_NEAR(mean, rho, 1e-6) << "rho=" << rho;
    // sum_{j>=2} (j-1) a_j = rho - 1 + a_0.
    EXPECT_NEAR(shifted, rho - 1.0 + a[0], 1e-6) << "rho=" << rho;
  }
}

TEST(EmbeddedChain, RowStructure) {
  const auto& ch = chain_half();
  const auto& k = ch.kernel;
  EXPECT_EQ(k.size(), 400u);
  for (std::size_t y = 0; y < 20; ++y) {
    EXPECT_EQ(k(0, y), ch.a[y]);
    EXPECT_EQ(k(1, y), ch.a[y]);
  }
  EXPECT_EQ(k(5, 3), 0.0);
  EXPECT_EQ(k(5, 4), ch.a[0]);
  EXPECT_EQ(k(5, 9), ch.a[5]);
  // The last row keeps only a_0 and a_1 inside the truncation.
  EXPECT_NEAR(ch.max_deficit, 1.0 - ch.a[0] - ch.a[1], 1e-12);
  // Row 0 loses only the arrival tail beyond N - 1, which is lumped there.
  EXPECT_LT(k(0, 399) - ch.a[399], 1e-6);
  EXPECT_FALSE(check_monotone(k).has_value());
}

TEST(Certificates, AtomConstants) {
  const auto cfg = mg1::Config::from_traffic(0.5, kAlpha);
  const auto cert = mg1::atom_certificate(cfg, chain_half());
  EXPECT_EQ(cert.constants.epsilon, 1.0);
  EXPECT_EQ(cert.constants.m_u, 0.0);
  EXPECT_EQ(cert.constants.m_v, 0.0);
  EXPECT_DOUBLE_EQ(cert.moments.u_fn(10.0, 0.0), 19.0);
  EXPECT_NEAR(cert.moments.b_u, 1.353890005349877, 1e-9);
}

TEST(Certificates, SmallSetConstants) {
  auto cfg = mg1::Config::from_traffic(0.5, kAlpha);
  cfg.x0 = 3;
  const auto cert = mg1::certificate(cfg, chain_half());
  EXPECT_NEAR(cert.constants.epsilon, 0.10673598153308869, 1e-9);
  EXPECT_NEAR(cert.moments.b_u, 1.3228064467298495, 1e-9);
  EXPECT_NEAR(cert.constants.m_u, 10.070450519945187, 1e-7);
  EXPECT_NO_THROW(verify_minorisation(chain_half().kernel, cert.minorisation));
  cfg.x0 = 1;
  EXPECT_EQ(mg1::certificate(cfg, chain_half()).label, "atom");
}

TEST(Certificates, U0BoundsExactHittingTimes) {
  const auto& k = chain_half().kernel;
  for (std::size_t x0 : {1u, 3u, 6u}) {
    auto cfg = mg1::Config::from_traffic(0.5, kAlpha);
    cfg.x0 = x0;
    const auto cert = mg1::certificate(cfg, chain_half());
    const auto h = hitting_means(k, x0);
    for (std::size_t x = 0; x < 200; ++x) {
      ASSERT_GE(cert.u0[x] + 1e-9, h[x] + 1.0) << "x0=" << x0 << " x=" << x;
    }
  }
}

TEST(Certificates, DriftHoldsOnTruncatedKernel) {
  // P U0 <= U0 - 1 off C: drift with phi = 1.
  const auto& k = chain_half().kernel;
  for (std::size_t x0 : {1u, 3u, 6u}) {
    auto cfg = mg1::Config::from_traffic(0.5, kAlpha);
    cfg.x0 = x0;
    const auto cert = mg1::certificate(cfg, chain_half());
    const auto pu = k.apply(cert.u0);
    for (std::size_t x = x0 + 1; x < k.size(); ++x) {
      ASSERT_LE(pu[x], cert.u0[x] - 1.0 + 1e-9) << "x0=" << x0 << " x=" << x;
    }
  }
}

TEST(Solve, EnlargesTruncationUntilTailIsSmall) {
  auto cfg = mg1::Config::from_traffic(0.9, kAlpha);
  cfg.truncation = 100;
  const auto s = mg1::solve(cfg, 1e-6);
  EXPECT_GT(s.config.truncation, 100u);
  EXPECT_LT(s.pi_last, 1e-6);
  auto tiny = mg1::Config::from_traffic(0.9, kAlpha);
  tiny.truncation = 50;
  EXPECT_THROW(mg1::solve(tiny, 1e-6, 100), NumericError);
}

TEST(Crossover, FirstStrictlyLowerIndex) {
  BoundCurve lower, upper;
  for (std::size_t n = 1; n <= 5; ++n) {
    lower.n.push_back(n);
    upper.n.push_back(n);
    lower.tv.push_back(n >= 4 ? 0.1 : 1.0);
    upper.tv.push_back(0.5);
  }
  EXPECT_EQ(*mg1::crossover(lower, upper), 4u);
  EXPECT_FALSE(mg1::crossover(upper, upper).has_value());
}
