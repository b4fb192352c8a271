#include "mcbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "mcbound/errors.hpp"

namespace mcbound {

YoungPair YoungPair::power(double p, double rho) {
  if (!(p > 1.0) || !(rho > 0.0 && rho < 1.0)) {
    std::ostringstream os;
    os << "power-family Young pair needs p > 1 and 0 < rho < 1 (got p=" << p
       << ", rho=" << rho << ")";
    throw ConfigurationError("Young pair: p > 1, 0 < rho < 1", os.str());
  }
  YoungPair yp;
  yp.rho = rho;
  yp.p = p;
  yp.alpha_fn = [p, rho](double u) { return std::pow(p * rho * u, 1.0 / p); };
  yp.beta_fn = [p, rho](double v) {
    return std::pow(p * (1.0 - rho) * v / (p - 1.0), (p - 1.0) / p);
  };
  return yp;
}

double compute_m_u(const RateSequence& r, double b_u, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    std::ostringstream os;
    os << "minorisation constant must lie in (0, 1]; got epsilon=" << epsilon;
    throw CertificateError("epsilon in (0, 1]", os.str());
  }
  if (!(b_u >= 1.0)) {
    std::ostringstream os;
    os << "b_U bounds a sum starting with r(0) = 1, so b_U >= 1; got " << b_u;
    throw CertificateError("b_U >= 1", os.str());
  }
  if (epsilon == 1.0) return 0.0;
  const double factor = b_u * (1.0 - epsilon) / epsilon;
  constexpr std::size_t kCap = 10'000'000;
  constexpr int kQuietRun = 10;
  double best = 0.0;
  double cum = 0.0;  // R(k+1)
  int quiet = 0;
  for (std::size_t k = 0; k <= kCap; ++k) {
    const double rk = r(k);
    cum += rk;
    const double term = factor * rk - cum;
    if (term > best) best = term;
    quiet = term <= 0.0 ? quiet + 1 : 0;
    if (quiet >= kQuietRun) return best;
  }
  throw NonTerminationError(
      "r subgeometric (r(k)/R(k+1) -> 0)",
      "M_U scan exceeded k = 10^7; the rate sequence is not subgeometric");
}

BoundConstants make_bound_constants(const RateSequence& r, double b_u,
                                    double b_v, double epsilon) {
  BoundConstants bc;
  bc.epsilon = epsilon;
  bc.b_u = b_u;
  bc.b_v = b_v;
  bc.m_u = compute_m_u(r, b_u, epsilon);
  bc.m_v = b_v * (1.0 - epsilon) / epsilon;
  return bc;
}

double tv_bound(const MomentBounds& mb, const BoundConstants& bc,
                const RateSequence& r, double x, double xp, std::size_t n) {
  const double u = mb.u_fn(x, xp);
  const double value = (u + bc.m_u) / (r.cumulative(n) + bc.m_u);
  return std::min(value, kTvDistanceMax);
}

double f_norm_bound(const MomentBounds& mb, const BoundConstants& bc, double x,
                    double xp) {
  return mb.v_fn(x, xp) + bc.m_v;
}

double interpolated_bound(const MomentBounds& mb, const BoundConstants& bc,
                          const RateSequence& r, const YoungPair& yp, double x,
                          double xp, std::size_t n) {
  const double num = yp.rho * (mb.u_fn(x, xp) + bc.m_u) +
                     (1.0 - yp.rho) * (mb.v_fn(x, xp) + bc.m_v);
  return num / yp.alpha(r.cumulative(n) + bc.m_u);
}

double admissible_f_violation(std::span<const double> f, const MomentBounds& mb,
                              const BoundConstants& bc) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double lhs = f[i] + f[j];
      const double rhs = mb.v_fn(static_cast<double>(i), static_cast<double>(j)) + bc.m_v;
      worst = std::max(worst, lhs - rhs);
    }
  }
  return worst;
}

BoundCurve bound_vs_stationary(const CurveInputs& in,
                               std::span<const double> support,
                               std::span<const double> weights,
                               unsigned threads) {
  if (support.size() != weights.size() || support.empty()) {
    throw ConfigurationError("pi support/weights aligned",
                             "stationary support and weights differ in size");
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(total - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "stationary weights sum to " << total << ", expected 1 within 1e-10";
    throw ConfigurationError("pi sums to 1", os.str());
  }
  const std::size_t m = support.size();
  std::vector<double> u(m);
  std::vector<double> v(m);
  double mean_u = 0.0;
  double mean_v = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    u[i] = in.moments.u_fn(in.x, support[i]);
    v[i] = in.moments.v_fn(in.x, support[i]);
    if (weights[i] > 0.0) {
      mean_u += weights[i] * u[i];
      mean_v += weights[i] * v[i];
    }
  }
  const BoundConstants& bc = in.constants;
  BoundCurve out;
  out.n.resize(in.nmax);
  out.tv.resize(in.nmax);
  out.f.assign(in.nmax, mean_v + bc.m_v);
  out.g.resize(in.nmax);
  std::vector<double> cum(in.nmax);
  for (std::size_t n = 1; n <= in.nmax; ++n) cum[n - 1] = in.rate.cumulative(n);

  auto fill = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t idx = lo; idx < hi; ++idx) {
      const double denom = cum[idx] + bc.m_u;
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i] * std::min(kTvDistanceMax, (u[i] + bc.m_u) / denom);
      }
      out.n[idx] = idx + 1;
      out.tv[idx] = std::min(acc, kTvDistanceMax);
      out.g[idx] = (in.young.rho * (mean_u + bc.m_u) +
                    (1.0 - in.young.rho) * (mean_v + bc.m_v)) /
                   in.young.alpha(denom);
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || in.nmax < 256) {
    fill(0, in.nmax);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (in.nmax + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(in.nmax, lo + chunk);
      if (lo < hi) pool.emplace_back(fill, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

BoundCurve pair_curve(const CurveInputs& in, double xp) {
  BoundCurve out;
  const double fb = f_norm_bound(in.moments, in.constants, in.x, xp);
  for (std::size_t n = 1; n <= in.nmax; ++n) {
    out.n.push_back(n);
    out.tv.push_back(tv_bound(in.moments, in.constants, in.rate, in.x, xp, n));
    out.f.push_back(fb);
    out.g.push_back(interpolated_bound(in.moments, in.constants, in.rate,
                                       in.young, in.x, xp, n));
  }
  return out;
}

std::optional<std::size_t> first_below(const BoundCurve& curve, double threshold) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.tv[i] <= threshold) return curve.n[i];
  }
  return std::nullopt;
}

void write_curve_csv(std::ostream& os, const BoundCurve& curve) {
  os << "n,bound_tv,bound_f,bound_g\n";
  char buf[128];
  for (std::size_t i = 0; i < curve.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", curve.n[i],
                  curve.tv[i], curve.f[i], curve.g[i]);
    os << buf;
  }
}

BoundCurve read_curve_csv(std::istream& is, std::string label) {
  BoundCurve curve;
  curve.label = std::move(label);
  std::string line;
  if (!std::getline(is, line) || line.rfind("n,", 0) != 0) {
    throw ConfigurationError("curve CSV header",
                             "curve CSV must start with a header beginning 'n,'");
  }
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(std::strtod(cell.c_str(), nullptr));
    if (cols.size() < 2) {
      throw ConfigurationError("curve CSV columns",
                               "line " + std::to_string(lineno) + ": expected at least 2 columns");
    }
    curve.n.push_back(static_cast<std::size_t>(cols[0]));
    curve.tv.push_back(cols[1]);
    curve.f.push_back(cols.size() > 2 ? cols[2] : 0.0);
    curve.g.push_back(cols.size() > 3 ? cols[3] : 0.0);
  }
  return curve;
}

}  // namespace mcbound
