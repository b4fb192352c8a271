#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcbound/bounds.hpp"
#include "mcbound/kernel.hpp"
#include "mcbound/rates.hpp"

namespace mcbound {

/// Solves pi P = pi, sum pi = 1 by dense LU. Requires every state to reach
/// state 0 (a single closed class), else CertificateError. Tiny negative
/// components from rounding are flushed and the result renormalised; a
/// residual ||pi P - pi||_1 above 1e-10 raises NumericError.
std::vector<double> stationary(const DiscreteKernel& k);

/// sum_y |mu(y) - pi(y)| for kL1, half of it for kDistance.
enum class TvConvention { kL1, kDistance };

struct ExactTvCurve {
  std::vector<double> tv;  // tv[n-1] for n = 1..nmax
  /// max_n P^n(x, last state): mass sitting on the truncation boundary.
  double boundary_mass = 0.0;
};

/// ||P^n(x, .) - pi|| for n = 1..nmax by repeated vector-matrix products.
ExactTvCurve exact_tv_curve(const DiscreteKernel& k, std::size_t x,
                            const std::vector<double>& pi, std::size_t nmax,
                            TvConvention convention = TvConvention::kL1);

struct DominanceReport {
  bool pass = true;
  std::size_t checked = 0;
  std::optional<std::size_t> first_violation;  // n
  double min_margin = 0.0;                     // min_n bound(n) - exact(n)
  std::size_t argmin_n = 0;
  double mean_margin = 0.0;
};

/// Compares bound.tv against exact[n-1] for every n present in both.
DominanceReport dominance_report(const BoundCurve& bound, const std::vector<double>& exact);

enum class CouplingKind { kOrdered, kIndependent };

struct CouplingSpec {
  CouplingKind kind = CouplingKind::kOrdered;
  std::size_t x = 0;
  std::size_t x_prime = 0;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t step_cap = 10'000'000;
};

struct CouplingEstimate {
  double mean_rate_sum = 0.0;  // E sum_{k=0}^{sigma} r(k)
  double se_rate_sum = 0.0;
  double mean_v_sum = 0.0;     // E sum_{k=0}^{sigma} v(X_k, X'_k)
  double se_v_sum = 0.0;
  double mean_coupling_time = 0.0;
  /// visits_at_coupling[j] = replicas whose coupling happened on visit j to C x C.
  std::vector<std::size_t> visits_at_coupling;
  std::size_t censored = 0;
  std::size_t replicas = 0;

  double censored_fraction() const {
    return replicas ? static_cast<double>(censored) / static_cast<double>(replicas) : 0.0;
  }
};

/// Simulates the coupled chain with coupling flag: off C x C both coordinates
/// move by P (common uniform for the ordered coupling, separate ones for the
/// independent one); on C x C a coin with heads probability eps sends both
/// to a common nu draw and merges them, and tails moves them by the residual
/// kernel. sigma is the first time n >= 0 with (X_n, X'_n) in C x C.
CouplingEstimate simulate_coupling(const DiscreteKernel& k, const MinorisationCert& cert,
                                   const CouplingSpec& spec, const RateSequence& r,
                                   const std::function<double(std::size_t, std::size_t)>& v);

/// Empirical law of the first coordinate after `steps` steps of the same
/// coupled chain, as counts over states.
std::vector<std::size_t> coupled_marginal_counts(const DiscreteKernel& k,
                                                 const MinorisationCert& cert,
                                                 const CouplingSpec& spec, std::size_t steps);

}  // namespace mcbound
