#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mcbound/bounds.hpp"
#include "mcbound/drift.hpp"
#include "mcbound/kernel.hpp"

namespace mcbound::isampler {

/// How the rate sequence is generated from the drift.
///   kEffective: phi(v) = (1 - x*)(r + 1) v^(1-1/alpha), the leading term of
///               phi0 with its negative constant dropped.
///   kConservative: the same power with coefficient phi0(1), which lies
///               below phi0 everywhere on [1, inf).
///   kExact: phi0 itself, with H and its inverse by quadrature.
enum class RateMode { kEffective, kConservative, kExact };

const char* to_string(RateMode m);
RateMode rate_mode_from_string(const std::string& s);

/// Independence sampler for the uniform target on [0, 1] with proposal
/// density q(x) = (r + 1) x^r, drift W0(x) = x^(-r alpha) and small set
/// C = [x*, 1] where q(x*) = eta*.
struct Config {
  double r = 2.0;
  double alpha = 1.1;
  double eta_star = 0.25;
  std::size_t grid_n = 200;
  RateMode rate_mode = RateMode::kEffective;
  double start_x = 1.0;
  /// Geometric cells used to mix the pair bound over pi on (0, x*).
  std::size_t pi_cells = 2000;

  /// r > 0, 1 < alpha < 1 + 1/r, 0 < eta* < r + 1 and the gate
  /// (1 - x*)(r + 1) > int (u ^ eta*) K dpsi. ConfigurationError names the
  /// failed inequality.
  void validate() const;
};

/// (eta / (r + 1))^(1/r), clipped to [0, 1].
double psi(double r, double eta);

/// The integrals and constants of the drift construction.
struct Constants {
  double x_star = 0.0;
  double epsilon = 0.0;
  double int_u_k = 0.0;      // int_0^{r+1} u K(u) dpsi(u)
  double int_min_k = 0.0;    // int_0^{r+1} (u ^ eta*) K(u) dpsi(u)
  double phi_coeff = 0.0;    // (1 - x*)(r + 1)
  double phi0_at_1 = 0.0;    // phi_coeff - int_min_k
  double k_eta = 0.0;        // K(eta*) = x*^(-r alpha)
  double sup_pw0_on_c = 0.0; // int_u_k + k_eta
  double nu_w0 = 0.0;        // mean of W0 over C under uniform pi
};

/// Integrals by quadrature in the u coordinate (tanh-sinh, 1e-12).
Constants constants(const Config& cfg);

/// Closed forms of the two integrals, for cross-checking the quadrature.
double int_u_k_closed(double r, double alpha);
double int_min_k_closed(double r, double alpha, double eta_star);

/// phi0(v) = (1 - x*) (r + 1) v^(1-1/alpha) - int (u ^ eta*) K dpsi.
PhiGenerator phi0(const Config& cfg, const Constants& c);

/// Drift certificate with W0(x) = x^(-r alpha), C = [x*, 1] at the bottom of
/// the order (larger x is lower), eps = eta* (1 - x*).
UnivariateDriftCert drift_certificate(const Config& cfg);

struct SamplerResult {
  Constants constants;
  CertifiedMoments certified;
  BoundConstants bound;
  BoundCurve curve;
  std::optional<std::size_t> n_star;  // first n with TV bound <= threshold
};

/// Bound curve from start_x mixed over pi, n = 1..nmax.
SamplerResult sampler_curves(const Config& cfg, std::size_t nmax, double threshold = 0.1);

/// Discretisation on grid_n equal cells of (0, 1]: entry (i, j) is the exact
/// cell integral of min(q(y), q(x_i)) at the cell midpoint x_i, with the
/// rejection mass on the diagonal. Index 0 is the cell next to 1, so the
/// index order is the chain's order.
struct Grid {
  DiscreteKernel kernel;
  std::vector<double> x;  // midpoint of each indexed cell
};
Grid discretized_kernel(const Config& cfg);

struct GridChecks {
  double slack = 0.0;                 // 5 / grid_n
  double worst_drift_excess = 0.0;    // max over cells off C of PW0 - W0 + phi0(W0)
  double worst_drift_x = 0.0;
  double minorisation_shortfall = 0.0;  // max over cells in C of eps nu_j - P(i, j)
  double stationarity_residual = 0.0;  // || pi P - pi ||_1 for uniform cell masses
  bool monotone = false;
};
GridChecks grid_checks(const Config& cfg, const Grid& grid);

}  // namespace mcbound::isampler
