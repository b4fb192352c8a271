#include "mcbound/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "mcbound/errors.hpp"

namespace mcbound {
namespace {

double slope_of(const PhiGenerator& phi, const RateSequence& rate) {
  return rate(1) / phi(1.0);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be supplied as a positive finite number (got " << v << ")";
    throw CertificateError(std::string(name) + " supplied", os.str());
  }
}

}  // namespace

double residual_mean_bound(double sup_pw_on_c, double nu_w, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    std::ostringstream os;
    os << "minorisation constant must lie in (0, 1]; got " << epsilon;
    throw CertificateError("epsilon in (0, 1]", os.str());
  }
  if (epsilon == 1.0) return nu_w;
  const double excess = sup_pw_on_c - epsilon * nu_w;
  if (excess < 0.0) {
    std::ostringstream os;
    os << "sup_C PW - eps nu(W) = " << excess
       << " < 0, so the residual kernel would carry negative mass";
    throw CertificateError("residual kernel non-negative", os.str());
  }
  return excess / (1.0 - epsilon);
}

CertifiedMoments moments_from_bivariate_drift(const BivariateDriftCert& cert) {
  if (!cert.w || !cert.in_cc) {
    throw CertificateError("drift function supplied",
                           "bivariate certificate needs W and the C x C predicate");
  }
  require_positive(cert.sup_pw_on_cc, "sup P W on C x C");
  require_positive(cert.sup_phi_w_on_cc, "sup phi(W) on C x C");
  CertifiedMoments out;
  out.rate = RateSequence::from_phi(cert.phi);
  out.epsilon = cert.epsilon;
  out.slope = slope_of(cert.phi, out.rate);
  const double k = out.slope;
  const double sup_phi = cert.sup_phi_w_on_cc;
  auto w = cert.w;
  auto in_cc = cert.in_cc;
  out.moments.u_fn = [w, in_cc, k](double x, double xp) {
    return in_cc(x, xp) ? 1.0 : 1.0 + k * (w(x, xp) - 1.0);
  };
  out.moments.v_fn = [w, in_cc, sup_phi](double x, double xp) {
    return in_cc(x, xp) ? sup_phi : sup_phi + w(x, xp);
  };
  // P W >= 1 because W >= 1, so these never fall below 1 and 0.
  out.moments.b_u = std::max(1.0, 1.0 + k * (cert.sup_pw_on_cc - 1.0));
  out.moments.b_v = sup_phi + cert.sup_pw_on_cc;
  return out;
}

std::pair<double, double> admissible_lambda(const UnivariateDriftCert& cert) {
  const double phi_d0 = cert.phi0(cert.d0);
  const double hi = 1.0 - cert.b0 / phi_d0;
  if (!(cert.d0 >= 1.0) || !(phi_d0 > cert.b0)) {
    std::ostringstream os;
    os << "need d0 >= 1 and phi0(d0) > b0; got d0=" << cert.d0
       << ", phi0(d0)=" << phi_d0 << ", b0=" << cert.b0;
    throw CertificateError("phi0(d0) > b0", os.str());
  }
  return {0.0, hi};
}

double default_lambda(const UnivariateDriftCert& cert) {
  return 0.5 * admissible_lambda(cert).second;
}

BivariateDriftCert bivariate_from_univariate(const UnivariateDriftCert& cert,
                                             std::optional<double> lambda) {
  const auto [lo, hi] = admissible_lambda(cert);
  const double lam = lambda.value_or(0.5 * hi);
  if (!(lam > lo && lam < hi)) {
    std::ostringstream os;
    os << "lambda=" << lam << " is outside the admissible interval (" << lo << ", "
       << hi << ")";
    throw ConfigurationError("lambda in (0, 1 - b0/phi0(d0))", os.str());
  }
  const double eps = cert.small_set.epsilon;
  BivariateDriftCert out;
  auto w0 = cert.w0;
  out.w = [w0](double x, double xp) { return w0(x) + w0(xp) - 1.0; };
  out.phi = cert.phi0.scaled(lam);
  auto in_c = cert.small_set.contains;
  out.in_cc = [in_c](double x, double xp) { return in_c(x) && in_c(xp); };
  out.epsilon = eps;
  out.sup_pw_on_cc = 2.0 * residual_mean_bound(cert.sup_pw0_on_c, cert.nu_w0, eps) - 1.0;
  out.sup_phi_w_on_cc = out.phi(2.0 * cert.sup_w0_on_c - 1.0);
  return out;
}

DriftCheck check_drift_on_kernel(const DiscreteKernel& k, const UnivariateDriftCert& cert) {
  const std::size_t n = k.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = cert.w0(static_cast<double>(i));
  const auto pw = k.apply(w);
  DriftCheck out;
  out.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i);
    const double rhs =
        w[i] - cert.phi0(w[i]) + (cert.small_set.contains(x) ? cert.b0 : 0.0);
    const double excess = pw[i] - rhs;
    if (excess > out.worst_excess) {
      out.worst_excess = excess;
      out.worst_state = i;
    }
  }
  return out;
}

CertifiedMoments moments_from_monotone_drift(const UnivariateDriftCert& cert,
                                             const DiscreteKernel* kernel) {
  if (!cert.w0 || !cert.small_set.contains) {
    throw CertificateError("drift function supplied",
                           "univariate certificate needs W0 and the small-set predicate");
  }
  require_positive(cert.sup_pw0_on_c, "sup_C P W0");
  require_positive(cert.nu_w0, "nu(W0)");
  require_positive(cert.sup_phi_w0_on_c, "sup_C phi(W0)");
  if (kernel != nullptr) {
    const DriftCheck dc = check_drift_on_kernel(*kernel, cert);
    const double scale = 1e-9 * (1.0 + std::abs(cert.w0(static_cast<double>(dc.worst_state))));
    if (dc.worst_excess > scale) {
      std::ostringstream os;
      os << "P W0 exceeds W0 - phi0(W0) + b0 1_C by " << dc.worst_excess << " at state "
         << dc.worst_state;
      throw CertificateError("drift PW0 <= W0 - phi0(W0) + b0 1_C", os.str());
    }
  }
  const PhiGenerator& phi = cert.rate_generator();
  CertifiedMoments out;
  out.rate = RateSequence::from_phi(phi);
  out.epsilon = cert.small_set.epsilon;
  out.slope = slope_of(phi, out.rate);
  const double res = residual_mean_bound(cert.sup_pw0_on_c, cert.nu_w0, out.epsilon);
  if (res < 1.0 - 1e-12) {
    std::ostringstream os;
    os << "residual mean of W0 is " << res << " < 1 although W0 >= 1";
    throw CertificateError("W0 >= 1", os.str());
  }
  const double k = out.slope;
  const double sup_phi = cert.sup_phi_w0_on_c;
  auto w0 = cert.w0;
  auto in_c = cert.small_set.contains;
  std::function<double(double, double)> join = cert.join;
  if (!join) join = [](double a, double b) { return std::max(a, b); };
  out.moments.u_fn = [w0, in_c, join, k](double x, double xp) {
    const double top = join(x, xp);
    return in_c(top) ? 1.0 : 1.0 + k * (w0(top) - 1.0);
  };
  out.moments.v_fn = [w0, in_c, join, sup_phi](double x, double xp) {
    const double top = join(x, xp);
    return in_c(top) ? sup_phi : sup_phi + w0(top);
  };
  out.moments.b_u = 1.0 + k * (std::max(res, 1.0) - 1.0);
  out.moments.b_v = sup_phi + res;
  return out;
}

}  // namespace mcbound
