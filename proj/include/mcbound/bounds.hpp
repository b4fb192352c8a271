#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcbound/rates.hpp"

namespace mcbound {

// Total variation is reported as the distance sup_A |mu(A) - nu(A)|, which
// is half of the l1 norm sup_{|g|<=1} |mu(g) - nu(g)|. The coupling argument
// bounds the probability that the two chains have not merged, which is a
// bound on this distance. Its maximum over probability measures is 1.
inline constexpr double kTvDistanceMax = 1.0;

/// Pair (alpha, beta) with alpha(u) beta(v) <= rho u + (1 - rho) v, used to
/// trade rate against norm strength.
struct YoungPair {
  double rho = 0.5;
  double p = 2.0;
  std::function<double(double)> alpha_fn;
  std::function<double(double)> beta_fn;

  /// Young's inequality with psi(x) = x^(p-1):
  /// alpha(u) = (p rho u)^(1/p), beta(v) = (p (1-rho) v / (p-1))^((p-1)/p).
  /// Requires p > 1 and 0 < rho < 1 (ConfigurationError otherwise).
  static YoungPair power(double p, double rho);

  double alpha(double u) const { return alpha_fn(u); }
  double beta(double v) const { return beta_fn(v); }
};

/// Bounds on the hitting-time moments U(x,x') and V(x,x') of C x C for the
/// bivariate chain, and their one-step suprema b_U, b_V over C x C.
struct MomentBounds {
  std::function<double(double, double)> u_fn;
  std::function<double(double, double)> v_fn;
  double b_u = 1.0;
  double b_v = 0.0;
};

struct BoundConstants {
  double m_u = 0.0;
  double m_v = 0.0;
  double epsilon = 1.0;
  double b_u = 1.0;
  double b_v = 0.0;
};

/// sup_k (b_u r(k) (1-eps)/eps - R(k+1))_+.
///
/// Scans k = 0, 1, ... and stops once the term has been non-positive
/// (equivalently r(k)/R(k+1) < eps / (b_u (1-eps))) for 10 consecutive k.
/// Throws CertificateError for eps outside (0, 1] or b_u < 1, and
/// NonTerminationError if k exceeds 10^7.
double compute_m_u(const RateSequence& r, double b_u, double epsilon);

/// M_U from compute_m_u and M_V = b_v (1-eps)/eps.
BoundConstants make_bound_constants(const RateSequence& r, double b_u,
                                    double b_v, double epsilon);

/// (U(x,x') + M_U) / (R(n) + M_U), clipped at kTvDistanceMax. n >= 1.
double tv_bound(const MomentBounds& mb, const BoundConstants& bc,
                const RateSequence& r, double x, double xp, std::size_t n);

/// V(x,x') + M_V, valid for every f with f(x) + f(x') <= V(x,x') + M_V.
double f_norm_bound(const MomentBounds& mb, const BoundConstants& bc, double x,
                    double xp);

/// [rho (U + M_U) + (1-rho) (V + M_V)] / alpha(R(n) + M_U), valid for every
/// g with g(x) + g(x') <= beta(V(x,x') + M_V).
double interpolated_bound(const MomentBounds& mb, const BoundConstants& bc,
                          const RateSequence& r, const YoungPair& yp, double x,
                          double xp, std::size_t n);

/// Largest f(x) + f(x') - (V(x,x') + M_V) over all index pairs of a finite
/// state space; <= 0 means f is admissible for the f-norm bound.
double admissible_f_violation(std::span<const double> f, const MomentBounds& mb,
                              const BoundConstants& bc);

struct BoundCurve {
  std::string label;
  std::vector<std::size_t> n;
  std::vector<double> tv;
  std::vector<double> f;
  std::vector<double> g;

  std::size_t size() const { return n.size(); }
};

struct CurveInputs {
  const MomentBounds& moments;
  const BoundConstants& constants;
  const RateSequence& rate;
  const YoungPair& young;
  double x = 0.0;
  std::size_t nmax = 1;
};

/// n -> sum_{x'} pi(x') bound(x, x', n) for n = 1..nmax and each bound
/// family. Each TV term is clipped before mixing. `support` holds the state
/// coordinates, `weights` the probabilities (must sum to 1 within 1e-10).
BoundCurve bound_vs_stationary(const CurveInputs& in,
                               std::span<const double> support,
                               std::span<const double> weights,
                               unsigned threads = 1);

/// Bound curves for a fixed pair (x, x').
BoundCurve pair_curve(const CurveInputs& in, double xp);

/// First n with tv(n) <= threshold.
std::optional<std::size_t> first_below(const BoundCurve& curve, double threshold);

/// CSV with header `n,bound_tv,bound_f,bound_g`, 17 significant digits.
void write_curve_csv(std::ostream& os, const BoundCurve& curve);
/// Reads the CSV written by write_curve_csv. Extra columns are ignored.
BoundCurve read_curve_csv(std::istream& is, std::string label = {});

}  // namespace mcbound
