#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mcbound/bounds.hpp"
#include "mcbound/kernel.hpp"
#include "mcbound/rates.hpp"

namespace mcbound::mg1 {

/// Queue length at departures of an M/G/1 queue with Poisson(lambda)
/// arrivals and a service law that is exponential-like up to B and has a
/// Pareto tail of index alpha beyond it.
struct Config {
  double lambda_arrival = 1.0;
  double b_tail = 1.0;
  double alpha_tail = 2.5;
  std::size_t x0 = 1;
  std::size_t truncation = 400;
  std::size_t start_x = 10;

  /// Picks lambda so that lambda m1 = rho for the given B and alpha.
  static Config from_traffic(double rho, double alpha, double b = 1.0);

  /// rho = lambda m1; throws ConfigurationError unless it is below 1.
  double traffic() const;
  /// Checks alpha > 1, B > 0, lambda > 0, rho < 1.
  void validate() const;
};

/// Service density: (alpha/B) e^{-alpha t/B} on [0, B] and
/// alpha B^alpha e^{-alpha} t^{-alpha-1} beyond.
double service_density(double t, double b, double alpha);

/// Mean service time B (1 + e^{-alpha}/(alpha - 1)) / alpha. Throws
/// DomainError for alpha <= 1, where the mean is infinite.
double service_moment_m1(double b, double alpha);

/// a_j = P(j arrivals during one service) for j = 0..count-1, by adaptive
/// quadrature split at B and around the Poisson mode.
std::vector<double> arrival_probabilities(const Config& cfg, std::size_t count,
                                          unsigned threads = 1);

struct EmbeddedChain {
  DiscreteKernel kernel;
  std::vector<double> a;       // a_0 .. a_N
  double max_deficit = 0.0;    // largest row mass moved to the last state
};

/// Truncated transition matrix on {0..N-1}: rows 0 and 1 are (a_0, a_1, ...),
/// row x >= 1 is a_{y-x+1} for y >= x-1. Each row's missing tail mass is put
/// on the last state.
EmbeddedChain embedded_matrix(const Config& cfg, unsigned threads = 1);

/// Everything the convergence bound needs for one small set, with r = 1.
struct Certificate {
  std::string label;
  MinorisationCert minorisation;
  MomentBounds moments;
  BoundConstants constants;
  RateSequence rate = RateSequence::constant();
  double sup_pu0_on_c = 0.0;
  double nu_u0 = 0.0;

  /// U0 on states, the univariate bound on 1 + E_x[sigma_C].
  std::vector<double> u0;
};

/// C = {0, 1} with eps = 1 and nu = row 0: U0(x) = 1 + (x - 1)/(1 - rho) for
/// x >= 2, b_U = nu(U0).
Certificate atom_certificate(const Config& cfg, const EmbeddedChain& chain);

/// C = {0..x0} for x0 >= 2 with the column-minimum minorisation:
/// U0(x) = 1 + (x - x0)/(1 - rho) off C. sup_C P U0 is the larger of the
/// tail-sum bound and the exact maximum on the truncated kernel.
Certificate smallset_certificate(const Config& cfg, const EmbeddedChain& chain);

/// Dispatches on cfg.x0: 1 gives the atom, larger values the small set.
Certificate certificate(const Config& cfg, const EmbeddedChain& chain);

/// A truncated chain together with its stationary law.
struct SolvedChain {
  Config config;  // truncation as finally used
  EmbeddedChain chain;
  std::vector<double> pi;
  double pi_last = 0.0;  // pi(N-1)
};

/// Builds the chain and solves for pi, doubling the truncation until
/// pi(N-1) < `tail_tol` (at most `max_truncation` states).
SolvedChain solve(Config cfg, double tail_tol = 1e-6, std::size_t max_truncation = 6400,
                  unsigned threads = 1);

/// Default truncation for a traffic level: 400 states up to rho = 0.5, 800 beyond.
std::size_t default_truncation(double rho);

struct FigureCurve {
  double rho = 0.0;
  std::size_t x0 = 1;
  Certificate cert;
  BoundCurve curve;
};

/// Bound-vs-pi curves for x = cfg.start_x and every x0 in `x0s` on one solved
/// chain, n = 1..nmax.
std::vector<FigureCurve> figure_curves(const SolvedChain& solved,
                                       const std::vector<std::size_t>& x0s,
                                       std::size_t nmax, unsigned threads = 1);

/// First n at which `lower` is strictly below `upper`, if any.
std::optional<std::size_t> crossover(const BoundCurve& lower, const BoundCurve& upper);

}  // namespace mcbound::mg1
