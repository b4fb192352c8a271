#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mcbound {

/// Concave generator phi : [1, inf) -> R+ of a subgeometric drift, together
/// with the derived functions H_phi(v) = int_1^v dx / phi(x) and its inverse.
///
/// Two families are supported: the polynomial family
/// phi(v) = c * v^(1 - 1/alpha) (c > 0, alpha > 1), for which H_phi and its
/// inverse have closed forms, and user-supplied generators that must come
/// with their derivative. User-supplied generators are integrated by adaptive
/// quadrature and inverted by bracketed bisection.
class PhiGenerator {
 public:
  static PhiGenerator polynomial(double c, double alpha);
  static PhiGenerator custom(std::function<double(double)> phi,
                             std::function<double(double)> derivative,
                             std::string name);

  double operator()(double v) const;
  double derivative(double v) const;

  /// H_phi(v). Throws DomainError for v < 1.
  double h(double v) const;
  /// H_phi^{-1}(t) for t >= 0, so that h(h_inverse(t)) == t to ~1e-12.
  double h_inverse(double t) const;

  /// lambda * phi, used when a univariate drift is lifted to pairs.
  PhiGenerator scaled(double lambda) const;

  bool is_polynomial() const noexcept { return polynomial_; }
  /// c of the polynomial family (NaN for custom generators).
  double coefficient() const noexcept { return c_; }
  /// alpha of the polynomial family (NaN for custom generators).
  double alpha() const noexcept { return alpha_; }
  const std::string& name() const noexcept { return name_; }

  /// Sample-tests membership of the concave class on a log-spaced grid over
  /// [1, 1e8]: phi(1) > 0, phi non-decreasing, non-positive second
  /// differences, phi' non-increasing. Throws CertificateError naming the
  /// first violated condition.
  void validate() const;

 private:
  PhiGenerator() = default;

  bool polynomial_ = false;
  double c_ = 0.0;
  double alpha_ = 0.0;
  std::function<double(double)> phi_;
  std::function<double(double)> dphi_;
  std::string name_;
};

/// Subgeometric rate sequence r(n), n >= 0, normalised so r(0) = 1, with a
/// memoised cumulative sum R(n) = sum_{k<n} r(k).
///
/// Values are immutable; the memo table is shared between copies and guarded
/// by a mutex, so a RateSequence may be read from several threads.
class RateSequence {
 public:
  enum class Kind { kConstant, kPolynomial, kTable, kFromPhi };

  /// r == 1.
  static RateSequence constant();
  /// r(n) = (1 + c n / alpha)^(alpha - 1), the rate generated by the
  /// polynomial phi family.
  static RateSequence polynomial(double c, double alpha);
  /// Explicit values; n beyond the table repeats the last value. Throws
  /// CertificateError if r(0) != 1, r decreases, or log r(n)/n increases.
  static RateSequence table(std::vector<double> values);
  /// r_phi(n) = phi(H^{-1}(n)) / phi(H^{-1}(0)).
  static RateSequence from_phi(const PhiGenerator& g);

  double operator()(std::size_t n) const;
  /// R(n); R(0) = 0.
  double cumulative(std::size_t n) const;

  Kind kind() const noexcept;
  std::string describe() const;

 private:
  struct Impl;
  explicit RateSequence(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<Impl> impl_;
};

double cumulative_rate(const RateSequence& r, std::size_t n);
double h_phi(const PhiGenerator& g, double v);
double h_phi_inverse(const PhiGenerator& g, double t);
RateSequence rate_from_phi(const PhiGenerator& g);

}  // namespace mcbound
