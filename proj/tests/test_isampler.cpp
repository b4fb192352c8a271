#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mcbound/errors.hpp"
#include "mcbound/isampler.hpp"
#include "mcbound/monotone.hpp"
#include "oracles.hpp"

using namespace mcbound;
using namespace mcbound::isampler;

namespace {

Config make(double r, double alpha, double eta) {
  Config c;
  c.r = r;
  c.alpha = alpha;
  c.eta_star = eta;
  return c;
}

// int_0^1 g(q(x)) x^(-r alpha) dx in the x coordinate, with x = s^m to
// smooth the endpoint singularity before Simpson.
double x_integral(double r, double alpha, const std::function<double(double)>& g) {
  const double m = 8.0;
  return oracle::simpson(
      [&](double s) {
        if (s <= 0.0) return 0.0;
        const double x = std::pow(s, m);
        return g((r + 1.0) * std::pow(x, r)) * std::pow(x, -r * alpha) * m * std::pow(s, m - 1.0);
      },
      0.0, 1.0, 200000);
}

void expect_invariant(const Config& c, const std::string& invariant) {
  try {
    c.validate();
    FAIL() << "accepted r=" << c.r << " alpha=" << c.alpha << " eta*=" << c.eta_star;
  } catch (const ConfigurationError& e) {
    EXPECT_EQ(e.invariant(), invariant);
  }
}

}  // namespace

TEST(Isampler, PsiAndEpsilon) {
  EXPECT_NEAR(psi(2.0, 0.25), 0.288675134594812882, 1e-15);
  EXPECT_EQ(psi(2.0, 3.0), 1.0);
  EXPECT_EQ(psi(2.0, 10.0), 1.0);
  const auto c = constants(make(2.0, 1.1, 0.25));
  EXPECT_NEAR(c.epsilon, 0.177831216351296779, 1e-15);
}

TEST(Isampler, IntegralsMatchClosedFormsAndSimpson) {
  for (auto [r, alpha, eta] : {std::tuple{2.0, 1.1, 0.25}, std::tuple{0.5, 1.5, 0.5},
                               std::tuple{1.0, 1.3, 0.8}}) {
    const auto c = constants(make(r, alpha, eta));
    EXPECT_NEAR(c.int_u_k, int_u_k_closed(r, alpha), 1e-10);
    EXPECT_NEAR(c.int_min_k, int_min_k_closed(r, alpha, eta), 1e-10);
    const double su = x_integral(r, alpha, [](double u) { return u; });
    const double sm = x_integral(r, alpha, [eta = eta](double u) { return std::min(u, eta); });
    EXPECT_NEAR(c.int_u_k, su, 1e-7) << "r=" << r;
    EXPECT_NEAR(c.int_min_k, sm, 1e-7) << "r=" << r;
  }
  const auto c = constants(make(2.0, 1.1, 0.25));
  EXPECT_NEAR(c.int_u_k, 3.75, 1e-10);
  EXPECT_NEAR(c.int_min_k, 2.104836494711, 1e-10);
}

TEST(Isampler, ParameterValidation) {
  expect_invariant(make(2.0, 1.5, 0.25), "1 < alpha < 1 + 1/r");
  expect_invariant(make(2.0, 1.0, 0.25), "1 < alpha < 1 + 1/r");
  expect_invariant(make(0.5, 3.0, 0.25), "1 < alpha < 1 + 1/r");
  expect_invariant(make(2.0, 1.1, 3.0), "0 < eta* < r + 1");
  expect_invariant(make(2.0, 1.1, 0.0), "0 < eta* < r + 1");
  expect_invariant(make(-1.0, 1.1, 0.25), "r > 0");
  EXPECT_NO_THROW(make(2.0, 1.1, 0.25).validate());
}

TEST(Isampler, DriftCertificateShape) {
  const auto cert = drift_certificate(make(2.0, 1.1, 0.25));
  const double xs = psi(2.0, 0.25);
  EXPECT_TRUE(cert.small_set.contains(1.0));
  EXPECT_TRUE(cert.small_set.contains(xs));
  EXPECT_FALSE(cert.small_set.contains(0.5 * xs));
  EXPECT_DOUBLE_EQ(cert.w0(1.0), 1.0);
  EXPECT_EQ(cert.join(0.2, 0.7), 0.2);
  EXPECT_GE(cert.b0, 0.0);
}

TEST(Isampler, TargetIterationCounts) {
  const auto a = sampler_curves(make(2.0, 1.1, 0.25), 2000);
  const auto b = sampler_curves(make(0.5, 1.5, 0.5), 500);
  ASSERT_TRUE(a.n_star.has_value());
  ASSERT_TRUE(b.n_star.has_value());
  EXPECT_EQ(*a.n_star, 661u);
  EXPECT_EQ(*b.n_star, 53u);
  EXPECT_NEAR(a.bound.m_u, 64.315, 1e-3);
}

TEST(Isampler, ConservativeModeIsSlower) {
  auto cfg = make(0.5, 1.5, 0.5);
  const auto eff = sampler_curves(cfg, 2000);
  cfg.rate_mode = RateMode::kConservative;
  const auto cons = sampler_curves(cfg, 2000);
  for (std::size_t i = 0; i < eff.curve.size(); ++i) ASSERT_GE(cons.curve.tv[i], eff.curve.tv[i] - 1e-12);
  EXPECT_EQ(rate_mode_from_string("exact"), RateMode::kExact);
  EXPECT_THROW(rate_mode_from_string("fast"), ConfigurationError);
}

TEST(Isampler, DiscretisedKernelChecks) {
  for (auto cfg : {make(2.0, 1.1, 0.25), make(0.5, 1.5, 0.5)}) {
    const auto grid = discretized_kernel(cfg);
    const auto g = grid_checks(cfg, grid);
    EXPECT_TRUE(g.monotone);
    EXPECT_LE(g.worst_drift_excess, g.slack);
    EXPECT_LE(g.minorisation_shortfall, g.slack);
    EXPECT_LT(g.stationarity_residual, 1e-3);
  }
}

// Property: P W0 <= W0 - phi0(W0) on every grid cell off C, for random
// admissible parameters, within the 5/grid_n slack.
TEST(Isampler, DriftPointwiseOnRandomGrids) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ur(0.3, 3.0), ut(0.05, 0.95), ue(0.05, 0.9);
  std::size_t cells = 0;
  int configs = 0;
  while (cells < 1000 || configs < 5) {
    Config cfg;
    cfg.r = ur(rng);
    cfg.alpha = 1.0 + ut(rng) / cfg.r;
    cfg.eta_star = ue(rng) * (cfg.r + 1.0);
    cfg.grid_n = 200;
    try {
      cfg.validate();
    } catch (const ConfigurationError&) {
      continue;
    }
    const auto grid = discretized_kernel(cfg);
    const auto c = constants(cfg);
    const auto p0 = phi0(cfg, c);
    const double ra = cfg.r * cfg.alpha;
    std::vector<double> w(grid.x.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(grid.x[i], -ra);
    const auto pw = grid.kernel.apply(w);
    const double slack = 5.0 / static_cast<double>(cfg.grid_n);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (grid.x[i] >= c.x_star) continue;
      ASSERT_LE(pw[i] - w[i] + p0(w[i]), slack)
          << "r=" << cfg.r << " alpha=" << cfg.alpha << " eta*=" << cfg.eta_star << " x=" << grid.x[i];
      ++cells;
    }
    ++configs;
  }
  EXPECT_GE(cells, 1000u);
}
