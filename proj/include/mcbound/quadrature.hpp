#pragma once

#include <functional>
#include <span>

namespace mcbound::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod (G15/K31) on [a, b]. `b` may be +infinity. The
// interval is bisected until the Kronrod error estimate is below
// max(abs_tol, rel_tol * |value|). Throws NumericError if the depth limit is
// reached first.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, double rel_tol = 1e-12);

// Same as integrate() but first splits [a, b] at the given interior points,
// which should include kinks and peaks of the integrand.
Result integrate_split(const std::function<double(double)>& f, double a,
                       double b, std::span<const double> breaks,
                       double abs_tol = 1e-12, double rel_tol = 1e-12);

// Double-exponential (tanh-sinh) rule for integrands with integrable
// power-law singularities at the endpoints of a finite interval.
Result integrate_singular(const std::function<double(double)>& f, double a,
                          double b, double rel_tol = 1e-12);

}  // namespace mcbound::quad
