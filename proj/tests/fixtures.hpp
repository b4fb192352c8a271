#pragma once

// Small certified chains shared by the unit suites and the acceptance run.

#include <algorithm>
#include <vector>

#include "mcbound/drift.hpp"
#include "mcbound/kernel.hpp"
#include "mcbound/monotone.hpp"

namespace fixture {

using namespace mcbound;

// Reflected walk on {0..n-1}: down 0.5, stay 0.2, up 0.3.
inline DiscreteKernel walk(std::size_t n) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) {
    if (x == 0) {
      rows[0][0] = 0.7;
      rows[0][1] = 0.3;
    } else if (x == n - 1) {
      rows[x][x - 1] = 0.5;
      rows[x][x] = 0.5;
    } else {
      rows[x][x - 1] = 0.5;
      rows[x][x] = 0.2;
      rows[x][x + 1] = 0.3;
    }
  }
  return DiscreteKernel::from_rows(rows);
}

inline PhiGenerator constant_phi() {
  return PhiGenerator::custom([](double) { return 1.0; }, [](double) { return 0.0; }, "constant");
}

inline UnivariateDriftCert walk_cert(const DiscreteKernel& k, std::size_t x0, double slope) {
  const auto minor = find_minorisation(k, x0);
  UnivariateDriftCert c;
  c.w0 = [x0, slope](double x) { return 1.0 + slope * std::max(0.0, x - static_cast<double>(x0)); };
  c.phi0 = constant_phi();
  c.small_set.contains = [x0](double x) { return x <= static_cast<double>(x0); };
  c.small_set.epsilon = minor.epsilon;
  std::vector<double> w(k.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = c.w0(static_cast<double>(i));
  const auto pw = k.apply(w);
  for (std::size_t x = 0; x <= x0; ++x) {
    c.sup_pw0_on_c = std::max(c.sup_pw0_on_c, pw[x]);
    c.b0 = std::max(c.b0, pw[x] - w[x] + 1.0);
  }
  for (std::size_t y = 0; y < w.size(); ++y) c.nu_w0 += minor.nu[y] * w[y];
  c.sup_phi_w0_on_c = 1.0;
  c.sup_w0_on_c = 1.0;
  c.d0 = c.w0(static_cast<double>(x0 + 1));
  return c;
}

// Hand-built certificate with phi0(d0) = 4 and b0 = 1, so the admissible
// lifting parameters are exactly (0, 3/4).
inline UnivariateDriftCert lambda_cert() {
  UnivariateDriftCert c;
  c.phi0 = PhiGenerator::polynomial(2.0, 2.0);
  c.d0 = 4.0;
  c.b0 = 1.0;
  c.w0 = [](double x) { return 1.0 + x; };
  c.small_set.contains = [](double x) { return x < 1.0; };
  c.small_set.epsilon = 0.5;
  c.sup_pw0_on_c = 3.0;
  c.nu_w0 = 2.0;
  return c;
}

}  // namespace fixture
