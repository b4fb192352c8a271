#pragma once

// Reference computations used by the tests. They deliberately avoid the
// library's own algorithms: plain Simpson instead of adaptive Gauss-Kronrod,
// brute-force scans instead of early stopping, matrix squaring instead of LU.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// Composite Simpson rule with `n` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      std::size_t n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) {
    s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  }
  return s * h / 3.0;
}

/// sup_k (b r(k) (1-eps)/eps - R(k+1))_+ over k < kmax with no early exit.
inline double brute_m_u(const std::function<double(std::size_t)>& r, double b, double eps,
                        std::size_t kmax = 200000) {
  double best = 0.0, cum = 0.0;
  for (std::size_t k = 0; k < kmax; ++k) {
    cum += r(k);
    best = std::max(best, b * r(k) * (1.0 - eps) / eps - cum);
  }
  return best;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  Matrix c(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

/// First row of P^(2^squarings); for an aperiodic irreducible chain this is
/// pi to machine precision once the mixing time is passed.
inline std::vector<double> stationary_by_squaring(Matrix p, int squarings = 40) {
  for (int i = 0; i < squarings; ++i) p = multiply(p, p);
  return p[0];
}

inline std::vector<double> step(const std::vector<double>& mu, const Matrix& p) {
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) out[j] += mu[i] * p[i][j];
  }
  return out;
}

/// Stochastically monotone kernel on n states: start from random rows, take
/// their CDFs and replace F_x by max_{x' >= x} F_x'. Every row keeps total
/// mass 1 and lower-set probabilities become non-increasing in x.
inline Matrix random_monotone(std::size_t n, std::mt19937_64& rng, double sparsity = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix cdf(n, std::vector<double>(n));
  for (std::size_t x = 0; x < n; ++x) {
    double total = 0.0;
    std::vector<double> w(n);
    for (std::size_t y = 0; y < n; ++y) {
      w[y] = u(rng) < sparsity ? 0.0 : u(rng);
      total += w[y];
    }
    if (total == 0.0) {
      w[x] = 1.0;
      total = 1.0;
    }
    double acc = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      acc += w[y] / total;
      cdf[x][y] = acc;
    }
    cdf[x][n - 1] = 1.0;
  }
  for (std::size_t x = n - 1; x-- > 0;) {
    for (std::size_t y = 0; y < n; ++y) cdf[x][y] = std::max(cdf[x][y], cdf[x + 1][y]);
  }
  Matrix p(n, std::vector<double>(n));
  for (std::size_t x = 0; x < n; ++x) {
    double prev = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      p[x][y] = std::max(0.0, cdf[x][y] - prev);
      prev = cdf[x][y];
    }
  }
  return p;
}

/// Law of (F_a^{-1}(U), F_b^{-1}(U)) for two CDF rows, by enumerating the
/// sorted union of their breakpoints. Keys are (y, y').
inline std::map<std::pair<std::size_t, std::size_t>, double> quantile_pair_law(
    const std::vector<double>& pa, const std::vector<double>& pb) {
  std::vector<double> fa(pa.size()), fb(pb.size());
  std::partial_sum(pa.begin(), pa.end(), fa.begin());
  std::partial_sum(pb.begin(), pb.end(), fb.begin());
  fa.back() = 1.0;
  fb.back() = 1.0;
  std::vector<double> cuts(fa);
  cuts.insert(cuts.end(), fb.begin(), fb.end());
  cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  std::map<std::pair<std::size_t, std::size_t>, double> law;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double lo = cuts[i - 1], hi = cuts[i];
    if (hi - lo <= 0.0) continue;
    const double mid = 0.5 * (lo + hi);
    const auto ya = static_cast<std::size_t>(std::lower_bound(fa.begin(), fa.end(), mid) - fa.begin());
    const auto yb = static_cast<std::size_t>(std::lower_bound(fb.begin(), fb.end(), mid) - fb.begin());
    law[{ya, yb}] += hi - lo;
  }
  return law;
}

}  // namespace oracle
