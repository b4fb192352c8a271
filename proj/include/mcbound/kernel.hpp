#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace mcbound {

/// Row-stochastic matrix over the totally ordered states 0 < 1 < ... < N-1.
/// Rows are stored densely together with their running sums, which the
/// quantile coupling needs.
class DiscreteKernel {
 public:
  /// Empty placeholder; every usable kernel comes from a factory below.
  DiscreteKernel() = default;

  /// Rows must be non-negative and sum to 1 within `tol`
  /// (CertificateError otherwise).
  static DiscreteKernel from_rows(std::vector<std::vector<double>> rows,
                                  double tol = 1e-12);

  /// Adds each row's deficit 1 - sum(row) to the last state, then validates.
  /// Returns the largest deficit repaired through `max_deficit` if non-null.
  static DiscreteKernel repaired(std::vector<std::vector<double>> rows,
                                 double* max_deficit = nullptr);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t x, std::size_t y) const { return p_[x * n_ + y]; }
  std::span<const double> row(std::size_t x) const {
    return {p_.data() + x * n_, n_};
  }
  /// P(x, {0..y}).
  double cdf(std::size_t x, std::size_t y) const { return cdf_[x * n_ + y]; }
  std::span<const double> cdf_row(std::size_t x) const {
    return {cdf_.data() + x * n_, n_};
  }

  /// mu P for a row vector mu.
  std::vector<double> left_apply(std::span<const double> mu) const;
  /// P f for a function f on states.
  std::vector<double> apply(std::span<const double> f) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> p_;
  std::vector<double> cdf_;
};

/// One-step minorisation P(x, .) >= epsilon nu(.) for x in C = {0, ..., x0}.
struct MinorisationCert {
  std::size_t x0 = 0;
  double epsilon = 1.0;
  std::vector<double> nu;

  bool contains(std::size_t x) const noexcept { return x <= x0; }
};

/// Kernel exchange format: one row per line, comma separated.
DiscreteKernel read_kernel_csv(std::istream& is);
void write_kernel_csv(std::ostream& os, const DiscreteKernel& k);

}  // namespace mcbound
