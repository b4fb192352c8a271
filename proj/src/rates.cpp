#include "mcbound/rates.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <vector>

#include "mcbound/errors.hpp"
#include "mcbound/quadrature.hpp"

namespace mcbound {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  std::vector<double> g;
  const double decades = std::log10(hi / lo);
  const int n = static_cast<int>(std::ceil(decades * per_decade));
  g.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    g.push_back(lo * std::pow(10.0, decades * i / n));
  }
  return g;
}

// Integral of 1/phi over [lo, hi], split geometrically so long ranges stay
// well resolved.
double integrate_reciprocal(const std::function<double(double)>& phi,
                            double lo, double hi) {
  std::vector<double> breaks;
  for (double p = lo * 4.0; p < hi; p *= 4.0) breaks.push_back(p);
  auto f = [&phi](double x) { return 1.0 / phi(x); };
  return quad::integrate_split(f, lo, hi, breaks, 1e-12, 1e-13).value;
}

}  // namespace

PhiGenerator PhiGenerator::polynomial(double c, double alpha) {
  if (!(c > 0.0) || !(alpha > 1.0)) {
    std::ostringstream os;
    os << "polynomial phi needs c > 0 and alpha > 1 (got c=" << c
       << ", alpha=" << alpha << ")";
    throw ConfigurationError("phi polynomial family: c > 0, alpha > 1",
                             os.str());
  }
  PhiGenerator g;
  g.polynomial_ = true;
  g.c_ = c;
  g.alpha_ = alpha;
  const double gamma = 1.0 - 1.0 / alpha;
  g.phi_ = [c, gamma](double v) { return c * std::pow(v, gamma); };
  g.dphi_ = [c, gamma](double v) { return c * gamma * std::pow(v, gamma - 1.0); };
  std::ostringstream os;
  os << "polynomial(c=" << c << ", alpha=" << alpha << ")";
  g.name_ = os.str();
  return g;
}

PhiGenerator PhiGenerator::custom(std::function<double(double)> phi,
                                  std::function<double(double)> derivative,
                                  std::string name) {
  if (!phi || !derivative) {
    throw ConfigurationError("phi custom family: derivative supplied",
                             "user-supplied phi must come with its derivative");
  }
  PhiGenerator g;
  g.polynomial_ = false;
  g.c_ = kNaN;
  g.alpha_ = kNaN;
  g.phi_ = std::move(phi);
  g.dphi_ = std::move(derivative);
  g.name_ = std::move(name);
  return g;
}

double PhiGenerator::operator()(double v) const { return phi_(v); }

double PhiGenerator::derivative(double v) const { return dphi_(v); }

double PhiGenerator::h(double v) const {
  if (!(v >= 1.0)) {
    std::ostringstream os;
    os << "H_phi is defined on [1, inf); got v=" << v;
    throw DomainError("H_phi domain: v >= 1", os.str());
  }
  if (v == 1.0) return 0.0;
  if (polynomial_) {
    return (alpha_ / c_) * (std::pow(v, 1.0 / alpha_) - 1.0);
  }
  return integrate_reciprocal(phi_, 1.0, v);
}

double PhiGenerator::h_inverse(double t) const {
  if (!(t >= 0.0)) {
    std::ostringstream os;
    os << "H_phi^{-1} is defined on [0, inf); got t=" << t;
    throw DomainError("H_phi inverse domain: t >= 0", os.str());
  }
  if (t == 0.0) return 1.0;
  if (polynomial_) {
    return std::pow(1.0 + c_ * t / alpha_, alpha_);
  }
  // Expand the bracket by doubling, then bisect. H is increasing, so the
  // bracket [lo, hi] always satisfies H(lo) <= t <= H(hi).
  double lo = 1.0;
  double h_lo = 0.0;
  double hi = 2.0;
  double h_hi = integrate_reciprocal(phi_, lo, hi);
  while (h_hi < t) {
    lo = hi;
    h_lo = h_hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw NumericError("H_phi inverse bracket",
                         "could not bracket H_phi^{-1}(t); H_phi bounded?");
    }
    h_hi = h_lo + integrate_reciprocal(phi_, lo, hi);
  }
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double h_mid = h_lo + integrate_reciprocal(phi_, lo, mid);
    if (h_mid < t) {
      lo = mid;
      h_lo = h_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

PhiGenerator PhiGenerator::scaled(double lambda) const {
  if (!(lambda > 0.0)) {
    throw ConfigurationError("phi scaling: lambda > 0",
                             "phi can only be scaled by a positive factor");
  }
  if (polynomial_) return polynomial(lambda * c_, alpha_);
  auto phi = phi_;
  auto dphi = dphi_;
  std::ostringstream os;
  os << lambda << "*" << name_;
  return custom([phi, lambda](double v) { return lambda * phi(v); },
                [dphi, lambda](double v) { return lambda * dphi(v); }, os.str());
}

void PhiGenerator::validate() const {
  const auto grid = log_grid(1.0, 1e8, 40);
  auto fail = [this](const std::string& inv, const std::string& detail) {
    throw CertificateError(inv, "phi " + name_ + " is not in the concave class: " + detail);
  };
  if (!(phi_(1.0) > 0.0)) fail("phi(1) > 0", "phi(1) <= 0");
  std::vector<double> val(grid.size());
  std::vector<double> der(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    val[i] = phi_(grid[i]);
    der[i] = dphi_(grid[i]);
    if (!std::isfinite(val[i]) || !std::isfinite(der[i])) {
      fail("phi finite", "non-finite value at v=" + std::to_string(grid[i]));
    }
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double scale = 1e-12 * (1.0 + std::abs(val[i]));
    if (val[i] < val[i - 1] - scale) {
      fail("phi non-decreasing", "phi decreases near v=" + std::to_string(grid[i]));
    }
    if (der[i] > der[i - 1] + 1e-12 * (1.0 + std::abs(der[i - 1]))) {
      fail("phi' non-increasing", "phi' increases near v=" + std::to_string(grid[i]));
    }
  }
  // Concavity on a non-uniform grid: slopes of consecutive chords decrease.
  for (std::size_t i = 2; i < grid.size(); ++i) {
    const double s1 = (val[i - 1] - val[i - 2]) / (grid[i - 1] - grid[i - 2]);
    const double s2 = (val[i] - val[i - 1]) / (grid[i] - grid[i - 1]);
    if (s2 > s1 + 1e-10 * (1.0 + std::abs(s1))) {
      fail("phi concave", "chord slope increases near v=" + std::to_string(grid[i]));
    }
  }
}

// --- RateSequence ----------------------------------------------------------

struct RateSequence::Impl {
  Kind kind;
  std::string description;
  std::function<double(std::size_t)> eval;

  mutable std::mutex mu;
  mutable std::vector<double> r;    // r[k]
  mutable std::vector<double> cum;  // cum[n] = R(n), cum[0] = 0

  void grow_to(std::size_t n) const {
    // Caller holds mu. Ensures r.size() >= n and cum.size() >= n + 1.
    if (cum.empty()) cum.push_back(0.0);
    if (r.size() >= n) return;
    std::size_t target = std::max<std::size_t>(n, 2 * r.size());
    target = std::max<std::size_t>(target, 64);
    r.reserve(target);
    cum.reserve(target + 1);
    for (std::size_t k = r.size(); k < target; ++k) {
      const double v = eval(k);
      r.push_back(v);
      cum.push_back(cum.back() + v);
    }
  }
};

RateSequence RateSequence::constant() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::kConstant;
  impl->description = "constant";
  impl->eval = [](std::size_t) { return 1.0; };
  return RateSequence(std::move(impl));
}

RateSequence RateSequence::polynomial(double c, double alpha) {
  if (!(c > 0.0) || !(alpha > 1.0)) {
    std::ostringstream os;
    os << "polynomial rate needs c > 0 and alpha > 1 (got c=" << c
       << ", alpha=" << alpha << ")";
    throw ConfigurationError("rate polynomial family: c > 0, alpha > 1", os.str());
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::kPolynomial;
  std::ostringstream os;
  os << "polynomial(c=" << c << ", alpha=" << alpha << ")";
  impl->description = os.str();
  impl->eval = [c, alpha](std::size_t n) {
    return std::pow(1.0 + c * static_cast<double>(n) / alpha, alpha - 1.0);
  };
  return RateSequence(std::move(impl));
}

RateSequence RateSequence::table(std::vector<double> values) {
  if (values.empty()) {
    throw CertificateError("rate table non-empty", "rate table is empty");
  }
  if (std::abs(values[0] - 1.0) > 1e-12) {
    throw CertificateError("r(0) = 1", "rate table must start with r(0) = 1");
  }
  for (std::size_t n = 1; n < values.size(); ++n) {
    if (values[n] < values[n - 1]) {
      throw CertificateError("r non-decreasing",
                             "rate table decreases at n=" + std::to_string(n));
    }
    if (n >= 2) {
      const double prev = std::log(values[n - 1]) / static_cast<double>(n - 1);
      const double cur = std::log(values[n]) / static_cast<double>(n);
      if (cur > prev + 1e-12) {
        throw CertificateError("log r(n)/n non-increasing",
                               "rate table is not subgeometric at n=" + std::to_string(n));
      }
    }
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::kTable;
  impl->description = "table(" + std::to_string(values.size()) + " values)";
  impl->eval = [v = std::move(values)](std::size_t n) {
    return n < v.size() ? v[n] : v.back();
  };
  return RateSequence(std::move(impl));
}

RateSequence RateSequence::from_phi(const PhiGenerator& g) {
  if (g.is_polynomial()) return polynomial(g.coefficient(), g.alpha());
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::kFromPhi;
  impl->description = "r_phi(" + g.name() + ")";
  const double phi1 = g(1.0);
  impl->eval = [g, phi1](std::size_t n) {
    if (n == 0) return 1.0;
    return g(g.h_inverse(static_cast<double>(n))) / phi1;
  };
  return RateSequence(std::move(impl));
}

double RateSequence::operator()(std::size_t n) const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  impl_->grow_to(n + 1);
  return impl_->r[n];
}

double RateSequence::cumulative(std::size_t n) const {
  if (n == 0) return 0.0;
  std::lock_guard<std::mutex> lock(impl_->mu);
  impl_->grow_to(n);
  return impl_->cum[n];
}

RateSequence::Kind RateSequence::kind() const noexcept { return impl_->kind; }

std::string RateSequence::describe() const { return impl_->description; }

double cumulative_rate(const RateSequence& r, std::size_t n) { return r.cumulative(n); }

double h_phi(const PhiGenerator& g, double v) { return g.h(v); }

double h_phi_inverse(const PhiGenerator& g, double t) { return g.h_inverse(t); }

RateSequence rate_from_phi(const PhiGenerator& g) { return RateSequence::from_phi(g); }

}  // namespace mcbound
