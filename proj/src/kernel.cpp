#include "mcbound/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mcbound/errors.hpp"

namespace mcbound {

DiscreteKernel DiscreteKernel::from_rows(std::vector<std::vector<double>> rows,
                                         double tol) {
  const std::size_t n = rows.size();
  if (n == 0) throw CertificateError("kernel non-empty", "kernel has no states");
  DiscreteKernel k;
  k.n_ = n;
  k.p_.resize(n * n);
  k.cdf_.resize(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    if (rows[x].size() != n) {
      throw CertificateError("kernel square",
                             "row " + std::to_string(x) + " has " +
                                 std::to_string(rows[x].size()) + " entries, expected " +
                                 std::to_string(n));
    }
    double acc = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      const double v = rows[x][y];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw CertificateError("kernel entries >= 0",
                               "entry (" + std::to_string(x) + "," + std::to_string(y) +
                                   ") is negative or not finite");
      }
      k.p_[x * n + y] = v;
      acc += v;
      k.cdf_[x * n + y] = acc;
    }
    if (std::abs(acc - 1.0) > tol) {
      std::ostringstream os;
      os << "row " << x << " sums to " << acc << " (tolerance " << tol << ")";
      throw CertificateError("kernel rows sum to 1", os.str());
    }
  }
  return k;
}

DiscreteKernel DiscreteKernel::repaired(std::vector<std::vector<double>> rows,
                                        double* max_deficit) {
  double worst = 0.0;
  for (auto& row : rows) {
    if (row.empty()) continue;
    double acc = 0.0;
    for (double v : row) acc += v;
    const double deficit = 1.0 - acc;
    row.back() += deficit;
    if (row.back() < 0.0 && row.back() > -1e-15) row.back() = 0.0;
    worst = std::max(worst, std::abs(deficit));
  }
  if (max_deficit != nullptr) *max_deficit = worst;
  return from_rows(std::move(rows));
}

std::vector<double> DiscreteKernel::left_apply(std::span<const double> mu) const {
  std::vector<double> out(n_, 0.0);
  for (std::size_t x = 0; x < n_; ++x) {
    const double w = mu[x];
    if (w == 0.0) continue;
    const double* row = p_.data() + x * n_;
    for (std::size_t y = 0; y < n_; ++y) out[y] += w * row[y];
  }
  return out;
}

std::vector<double> DiscreteKernel::apply(std::span<const double> f) const {
  std::vector<double> out(n_, 0.0);
  for (std::size_t x = 0; x < n_; ++x) {
    const double* row = p_.data() + x * n_;
    double acc = 0.0;
    for (std::size_t y = 0; y < n_; ++y) acc += row[y] * f[y];
    out[x] = acc;
  }
  return out;
}

DiscreteKernel read_kernel_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        throw ConfigurationError("kernel CSV numeric",
                                 "line " + std::to_string(lineno) + ": '" + cell +
                                     "' is not a number");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return DiscreteKernel::from_rows(std::move(rows), 1e-9);
}

void write_kernel_csv(std::ostream& os, const DiscreteKernel& k) {
  char buf[40];
  for (std::size_t x = 0; x < k.size(); ++x) {
    for (std::size_t y = 0; y < k.size(); ++y) {
      std::snprintf(buf, sizeof buf, "%.17g", k(x, y));
      os << (y ? "," : "") << buf;
    }
    os << '\n';
  }
}

}  // namespace mcbound
