#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "mcbound/kernel.hpp"

namespace mcbound {

/// Witness that x -> P(x, {0..a}) increases between x and x + 1.
struct MonotoneViolation {
  std::size_t x = 0;
  std::size_t x_next = 0;
  std::size_t a = 0;
  double excess = 0.0;  // P(x+1, {0..a}) - P(x, {0..a}) > 0
};

/// Stochastic monotonicity: every lower-set probability P(x, {0..a}) is
/// non-increasing in x. Differences up to `tol` are treated as rounding.
std::optional<MonotoneViolation> check_monotone(const DiscreteKernel& k,
                                                double tol = 1e-12);

/// min{ y : P(x, {0..y}) >= u } for u in (0, 1]. For u = 1 this is the
/// largest state with positive mass, independent of rounding in the CDF.
std::size_t quantile(const DiscreteKernel& k, std::size_t x, double u);

/// Residual kernel Q(x, .) = (P(x, .) - eps nu) / (1 - eps) on C, or nu when
/// eps = 1. Rows outside C are copied from P. Entries below -1e-12 raise
/// CertificateError; smaller negative noise is flushed to zero.
DiscreteKernel residual_kernel(const DiscreteKernel& k, const MinorisationCert& cert);

/// One step of the pathwise-ordered coupling driven by a single uniform u:
/// both coordinates move with the quantile of Q when (x, x') is in C x C and
/// with the quantile of P otherwise. `q` must be residual_kernel(k, cert).
std::pair<std::size_t, std::size_t> ordered_coupling_step(
    const DiscreteKernel& k, const DiscreteKernel& q, const MinorisationCert& cert,
    std::pair<std::size_t, std::size_t> state, double u);

/// Convenience overload that builds the residual kernel on each call.
std::pair<std::size_t, std::size_t> ordered_coupling_step(
    const DiscreteKernel& k, const MinorisationCert& cert,
    std::pair<std::size_t, std::size_t> state, double u);

/// Exact law of the next pair: the coupling is a step function of u, so it
/// is enumerated over the union of both rows' CDF breakpoints.
struct CoupledOutcome {
  std::size_t y = 0;
  std::size_t y_prime = 0;
  double mass = 0.0;
};
std::vector<CoupledOutcome> coupling_law(const DiscreteKernel& k, const DiscreteKernel& q,
                                         const MinorisationCert& cert,
                                         std::pair<std::size_t, std::size_t> state);

/// Largest one-step minorisation on C = {0..x0}: eps = sum_y min_{x in C} P(x, y),
/// nu = column minima / eps. Throws CertificateError when eps = 0.
MinorisationCert find_minorisation(const DiscreteKernel& k, std::size_t x0);

/// Largest P(x, y) shortfall below eps nu(y) over x in C, or a negative value
/// when the certificate holds strictly. Also validates that nu sums to 1.
double minorisation_violation(const DiscreteKernel& k, const MinorisationCert& cert);

/// Throws CertificateError when minorisation_violation exceeds `tol`.
void verify_minorisation(const DiscreteKernel& k, const MinorisationCert& cert,
                         double tol = 1e-12);

}  // namespace mcbound
