#include "mcbound/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "mcbound/errors.hpp"

namespace mcbound {
namespace {

void require_state(const DiscreteKernel& k, std::size_t x, const char* what) {
  if (x >= k.size()) {
    std::ostringstream os;
    os << what << " " << x << " is outside the state space {0.." << k.size() - 1 << "}";
    throw DomainError("state in range", os.str());
  }
}

void require_cert_shape(const DiscreteKernel& k, const MinorisationCert& cert) {
  if (cert.nu.size() != k.size()) {
    throw CertificateError("nu defined on every state",
                           "minorising measure has " + std::to_string(cert.nu.size()) +
                               " entries for a kernel on " + std::to_string(k.size()) +
                               " states");
  }
  if (!(cert.epsilon > 0.0 && cert.epsilon <= 1.0)) {
    std::ostringstream os;
    os << "minorisation constant must lie in (0, 1]; got " << cert.epsilon;
    throw CertificateError("epsilon in (0, 1]", os.str());
  }
  require_state(k, cert.x0, "small-set threshold");
}

std::size_t last_positive(std::span<const double> row) {
  for (std::size_t y = row.size(); y-- > 0;) {
    if (row[y] > 0.0) return y;
  }
  return row.size() - 1;
}

}  // namespace

std::optional<MonotoneViolation> check_monotone(const DiscreteKernel& k, double tol) {
  for (std::size_t x = 0; x + 1 < k.size(); ++x) {
    const auto lo = k.cdf_row(x);
    const auto hi = k.cdf_row(x + 1);
    for (std::size_t a = 0; a < k.size(); ++a) {
      if (hi[a] > lo[a] + tol) return MonotoneViolation{x, x + 1, a, hi[a] - lo[a]};
    }
  }
  return std::nullopt;
}

std::size_t quantile(const DiscreteKernel& k, std::size_t x, double u) {
  if (!(u > 0.0 && u <= 1.0)) {
    std::ostringstream os;
    os << "quantile level must lie in (0, 1]; got u=" << u;
    throw DomainError("u in (0, 1]", os.str());
  }
  require_state(k, x, "state");
  const auto row = k.row(x);
  if (u == 1.0) return last_positive(row);
  const auto cdf = k.cdf_row(x);
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  // A CDF that stops a few ulps short of 1 cannot place u; the mass it
  // misses belongs to the top of the support.
  if (it == cdf.end()) return last_positive(row);
  return static_cast<std::size_t>(it - cdf.begin());
}

DiscreteKernel residual_kernel(const DiscreteKernel& k, const MinorisationCert& cert) {
  require_cert_shape(k, cert);
  const std::size_t n = k.size();
  std::vector<std::vector<double>> rows(n, std::vector<double>(n));
  const double eps = cert.epsilon;
  for (std::size_t x = 0; x < n; ++x) {
    const auto p = k.row(x);
    if (!cert.contains(x)) {
      std::copy(p.begin(), p.end(), rows[x].begin());
      continue;
    }
    if (eps == 1.0) {
      std::copy(cert.nu.begin(), cert.nu.end(), rows[x].begin());
      continue;
    }
    // Dividing by the residual's own mass rather than 1 - eps keeps rows
    // stochastic when eps is 1 up to rounding.
    double mass = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      const double v = p[y] - eps * cert.nu[y];
      if (v < -1e-12) {
        std::ostringstream os;
        os << "residual mass at (" << x << "," << y << ") is " << v / (1.0 - eps)
           << "; P(x,y) < eps nu(y) so the minorisation fails";
        throw CertificateError("minorisation P >= eps nu on C", os.str());
      }
      rows[x][y] = std::max(v, 0.0);
      mass += rows[x][y];
    }
    if (mass <= 1e-12) {
      std::copy(cert.nu.begin(), cert.nu.end(), rows[x].begin());
    } else {
      for (double& v : rows[x]) v /= mass;
    }
  }
  return DiscreteKernel::from_rows(std::move(rows), 1e-10);
}

std::pair<std::size_t, std::size_t> ordered_coupling_step(
    const DiscreteKernel& k, const DiscreteKernel& q, const MinorisationCert& cert,
    std::pair<std::size_t, std::size_t> state, double u) {
  const bool in_cc = cert.contains(state.first) && cert.contains(state.second);
  const DiscreteKernel& m = in_cc ? q : k;
  return {quantile(m, state.first, u), quantile(m, state.second, u)};
}

std::pair<std::size_t, std::size_t> ordered_coupling_step(
    const DiscreteKernel& k, const MinorisationCert& cert,
    std::pair<std::size_t, std::size_t> state, double u) {
  return ordered_coupling_step(k, residual_kernel(k, cert), cert, state, u);
}

std::vector<CoupledOutcome> coupling_law(const DiscreteKernel& k, const DiscreteKernel& q,
                                         const MinorisationCert& cert,
                                         std::pair<std::size_t, std::size_t> state) {
  const bool in_cc = cert.contains(state.first) && cert.contains(state.second);
  const DiscreteKernel& m = in_cc ? q : k;
  std::vector<double> cuts;
  for (std::size_t x : {state.first, state.second}) {
    for (double c : m.cdf_row(x)) {
      if (c > 0.0 && c < 1.0) cuts.push_back(c);
    }
  }
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  // Rows of a monotone kernel that share a breakpoint in exact arithmetic can
  // disagree in the last bit after summation. Merging near-equal cuts and
  // evaluating quantiles at interval midpoints keeps such ties ordered.
  std::vector<double> merged;
  for (double c : cuts) {
    if (!merged.empty() && c - merged.back() < 1e-14) {
      merged.back() = c;
    } else {
      merged.push_back(c);
    }
  }

  std::map<std::pair<std::size_t, std::size_t>, double> law;
  double prev = 0.0;
  for (double c : merged) {
    const double width = c - prev;
    if (width > 0.0) {
      const double mid = prev + 0.5 * width;
      law[{quantile(m, state.first, mid), quantile(m, state.second, mid)}] += width;
    }
    prev = c;
  }
  std::vector<CoupledOutcome> out;
  out.reserve(law.size());
  for (const auto& [yy, mass] : law) out.push_back({yy.first, yy.second, mass});
  return out;
}

MinorisationCert find_minorisation(const DiscreteKernel& k, std::size_t x0) {
  require_state(k, x0, "small-set threshold");
  const std::size_t n = k.size();
  std::vector<double> colmin(k.row(0).begin(), k.row(0).end());
  for (std::size_t x = 1; x <= x0; ++x) {
    const auto row = k.row(x);
    for (std::size_t y = 0; y < n; ++y) colmin[y] = std::min(colmin[y], row[y]);
  }
  double eps = 0.0;
  for (double v : colmin) eps += v;
  if (!(eps > 0.0)) {
    throw CertificateError("epsilon > 0",
                           "rows 0.." + std::to_string(x0) +
                               " have disjoint supports; no one-step minorisation exists");
  }
  MinorisationCert cert;
  cert.x0 = x0;
  // Rounding can push the column-min sum a hair above 1 for an atom.
  cert.epsilon = std::min(eps, 1.0);
  cert.nu.resize(n);
  for (std::size_t y = 0; y < n; ++y) cert.nu[y] = colmin[y] / eps;
  return cert;
}

double minorisation_violation(const DiscreteKernel& k, const MinorisationCert& cert) {
  require_cert_shape(k, cert);
  double total = 0.0;
  for (double v : cert.nu) {
    if (v < 0.0) {
      throw CertificateError("nu >= 0", "minorising measure has a negative entry");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "minorising measure sums to " << total << ", expected 1 within 1e-12";
    throw CertificateError("nu sums to 1", os.str());
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x <= cert.x0; ++x) {
    const auto row = k.row(x);
    for (std::size_t y = 0; y < k.size(); ++y) {
      worst = std::max(worst, cert.epsilon * cert.nu[y] - row[y]);
    }
  }
  return worst;
}

void verify_minorisation(const DiscreteKernel& k, const MinorisationCert& cert, double tol) {
  const double gap = minorisation_violation(k, cert);
  if (gap > tol) {
    std::ostringstream os;
    os << "P(x, y) falls short of eps nu(y) by " << gap << " for some x in C";
    throw CertificateError("minorisation P >= eps nu on C", os.str());
  }
}

}  // namespace mcbound
