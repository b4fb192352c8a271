#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "mcbound/bounds.hpp"
#include "mcbound/kernel.hpp"
#include "mcbound/rates.hpp"

namespace mcbound {

/// Small set C with a one-step minorisation constant. The minorising measure
/// itself only enters through the numbers it integrates, so it is not stored.
struct SmallSet {
  std::function<bool(double)> contains;
  double epsilon = 1.0;
  std::string description;
};

/// Drift PW0 <= W0 - phi0(W0) + b0 1_C for the chain itself, with the
/// one-step quantities over C that the moment bounds need.
struct UnivariateDriftCert {
  std::function<double(double)> w0;
  PhiGenerator phi0 = PhiGenerator::polynomial(1.0, 2.0);
  /// Generator of the rate sequence when it differs from phi0 (for example a
  /// leading-order rate for an analytic example). Unset means phi0.
  std::optional<PhiGenerator> rate_phi;
  double b0 = 0.0;
  SmallSet small_set;
  double d0 = 1.0;               // inf of W0 off C
  double sup_pw0_on_c = 0.0;     // sup_C P W0
  double nu_w0 = 0.0;            // nu(W0)
  double sup_phi_w0_on_c = 0.0;  // sup_C phi(W0), phi the rate generator
  double sup_w0_on_c = 1.0;      // sup_C W0
  /// Join of the total order used to lift univariate bounds to pairs.
  /// Defaults to max, i.e. states are ordered as numbers.
  std::function<double(double, double)> join;

  const PhiGenerator& rate_generator() const { return rate_phi ? *rate_phi : phi0; }
};

/// Drift for the coupled chain on pairs, with C x C as small set.
struct BivariateDriftCert {
  std::function<double(double, double)> w;
  PhiGenerator phi = PhiGenerator::polynomial(1.0, 2.0);
  std::function<bool(double, double)> in_cc;
  double epsilon = 1.0;
  double sup_pw_on_cc = 0.0;      // sup over C x C of the coupled P W
  double sup_phi_w_on_cc = 0.0;   // sup over C x C of phi(W)
};

/// Moment bounds together with the rate they certify and the minorisation
/// constant the bound constants need.
struct CertifiedMoments {
  MomentBounds moments;
  RateSequence rate = RateSequence::constant();
  double epsilon = 1.0;
  /// r_phi(1) / phi(1), the slope of U in W.
  double slope = 0.0;
};

/// (1 - eps)^{-1} (sup_C P W0 - eps nu(W0)), or nu(W0) when eps = 1:
/// a bound on the residual kernel's mean of W0 over C.
double residual_mean_bound(double sup_pw_on_c, double nu_w, double epsilon);

CertifiedMoments moments_from_bivariate_drift(const BivariateDriftCert& cert);

/// Open interval (0, 1 - b0/phi0(d0)) of admissible scalings.
std::pair<double, double> admissible_lambda(const UnivariateDriftCert& cert);
/// Midpoint of admissible_lambda.
double default_lambda(const UnivariateDriftCert& cert);

/// W = W0(x) + W0(x') - 1 with phi = lambda phi0. Throws ConfigurationError
/// naming the interval when lambda is not admissible, and CertificateError
/// when phi0(d0) <= b0 leaves no room at all.
BivariateDriftCert bivariate_from_univariate(const UnivariateDriftCert& cert,
                                             std::optional<double> lambda = std::nullopt);

/// Worst pointwise excess of P W0 over W0 - phi0(W0) + b0 1_C on a finite
/// kernel, where state i has coordinate i. Non-positive means the drift holds.
struct DriftCheck {
  double worst_excess = 0.0;
  std::size_t worst_state = 0;
};
DriftCheck check_drift_on_kernel(const DiscreteKernel& k, const UnivariateDriftCert& cert);

/// Univariate bounds for a stochastically monotone chain with bottom small
/// set, lifted to pairs through the join. When `kernel` is supplied the drift
/// inequality is verified on it first (relative slack 1e-9).
CertifiedMoments moments_from_monotone_drift(const UnivariateDriftCert& cert,
                                             const DiscreteKernel* kernel = nullptr);

}  // namespace mcbound
