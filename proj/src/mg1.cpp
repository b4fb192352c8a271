#include "mcbound/mg1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "mcbound/drift.hpp"
#include "mcbound/errors.hpp"
#include "mcbound/monotone.hpp"
#include "mcbound/quadrature.hpp"
#include "mcbound/verify.hpp"

namespace mcbound::mg1 {

double service_density(double t, double b, double alpha) {
  if (t < 0.0) return 0.0;
  if (t <= b) return (alpha / b) * std::exp(-alpha * t / b);
  return alpha * std::pow(b, alpha) * std::exp(-alpha) * std::pow(t, -alpha - 1.0);
}

double service_moment_m1(double b, double alpha) {
  if (!(alpha > 1.0)) {
    std::ostringstream os;
    os << "service tail index alpha=" << alpha << " gives an infinite mean";
    throw DomainError("alpha > 1 (finite mean service)", os.str());
  }
  return b * (1.0 + std::exp(-alpha) / (alpha - 1.0)) / alpha;
}

Config Config::from_traffic(double rho, double alpha, double b) {
  if (!(rho > 0.0 && rho < 1.0)) {
    std::ostringstream os;
    os << "traffic intensity must lie in (0, 1); got rho=" << rho;
    throw ConfigurationError("0 < rho < 1", os.str());
  }
  Config cfg;
  cfg.b_tail = b;
  cfg.alpha_tail = alpha;
  cfg.lambda_arrival = rho / service_moment_m1(b, alpha);
  cfg.truncation = default_truncation(rho);
  return cfg;
}

double Config::traffic() const { return lambda_arrival * service_moment_m1(b_tail, alpha_tail); }

void Config::validate() const {
  if (!(b_tail > 0.0)) throw ConfigurationError("B > 0", "tail onset B must be positive");
  if (!(lambda_arrival > 0.0)) {
    throw ConfigurationError("lambda > 0", "arrival rate must be positive");
  }
  const double rho = traffic();
  if (!(rho < 1.0)) {
    std::ostringstream os;
    os << "traffic rho = lambda m1 = " << rho << " is not below 1; the queue is unstable";
    throw ConfigurationError("rho < 1", os.str());
  }
  if (truncation < x0 + 2) {
    throw ConfigurationError("truncation >= x0 + 2",
                             "truncation must leave room above the small set");
  }
}

std::size_t default_truncation(double rho) { return rho <= 0.5 ? 400 : 800; }

std::vector<double> arrival_probabilities(const Config& cfg, std::size_t count,
                                          unsigned threads) {
  const double lam = cfg.lambda_arrival;
  const double b = cfg.b_tail;
  const double alpha = cfg.alpha_tail;
  std::vector<double> a(count);
  auto one = [&](std::size_t j) {
    const double jd = static_cast<double>(j);
    const double log_fact = std::lgamma(jd + 1.0);
    auto f = [=](double t) {
      if (t <= 0.0) return j == 0 ? service_density(0.0, b, alpha) : 0.0;
      const double lt = lam * t;
      return std::exp(-lt + jd * std::log(lt) - log_fact) * service_density(t, b, alpha);
    };
    // The Poisson weight in t peaks at j/lambda with width sqrt(j+1)/lambda.
    const double mode = jd / lam;
    const double width = 10.0 * std::sqrt(jd + 1.0) / lam;
    std::vector<double> breaks;
    for (double p : {mode - width, mode, mode + width}) {
      if (p > b && (breaks.empty() || p > breaks.back())) breaks.push_back(p);
    }
    try {
      double v = quad::integrate(f, 0.0, b, 1e-16, 1e-12).value;
      double lo = b;
      for (double p : breaks) {
        v += quad::integrate(f, lo, p, 1e-16, 1e-12).value;
        lo = p;
      }
      v += quad::integrate(f, lo, std::numeric_limits<double>::infinity(), 1e-16, 1e-12).value;
      a[j] = v;
    } catch (const NumericError& e) {
      throw NumericError("a_j quadrature", "a_" + std::to_string(j) + ": " + e.what());
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::size_t j = 0; j < count; ++j) one(j);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t j = t; j < count; j += threads) one(j);
      });
    }
    for (auto& th : pool) th.join();
  }
  return a;
}

EmbeddedChain embedded_matrix(const Config& cfg, unsigned threads) {
  cfg.validate();
  const std::size_t n = cfg.truncation;
  EmbeddedChain out;
  out.a = arrival_probabilities(cfg, n + 1, threads);
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t first = x == 0 ? 0 : x - 1;
    for (std::size_t y = first; y < n; ++y) {
      rows[x][y] = out.a[x == 0 ? y : y + 1 - x];
    }
  }
  out.kernel = DiscreteKernel::repaired(std::move(rows), &out.max_deficit);
  return out;
}

namespace {

Certificate build(const Config& cfg, const EmbeddedChain& chain, MinorisationCert minor,
                  double sup_pu0, std::string label) {
  const double rho = cfg.traffic();
  const double x0 = static_cast<double>(minor.x0);
  auto u0 = [rho, x0](double x) { return x > x0 ? 1.0 + (x - x0) / (1.0 - rho) : 1.0; };

  Certificate c;
  c.label = std::move(label);
  const std::size_t n = chain.kernel.size();
  c.u0.resize(n);
  for (std::size_t y = 0; y < n; ++y) c.u0[y] = u0(static_cast<double>(y));
  for (std::size_t y = 0; y < n; ++y) c.nu_u0 += minor.nu[y] * c.u0[y];

  const auto pu0 = chain.kernel.apply(c.u0);
  double exact = 0.0;
  for (std::size_t x = 0; x <= minor.x0; ++x) exact = std::max(exact, pu0[x]);
  c.sup_pu0_on_c = std::max(sup_pu0, exact);

  const double b_u = residual_mean_bound(c.sup_pu0_on_c, c.nu_u0, minor.epsilon);
  // U0 also bounds V0 here: with r = 1 both count the same hitting time.
  c.moments.u_fn = [u0](double x, double xp) { return u0(std::max(x, xp)); };
  c.moments.v_fn = c.moments.u_fn;
  c.moments.b_u = b_u;
  c.moments.b_v = b_u;
  c.constants = make_bound_constants(c.rate, b_u, b_u, minor.epsilon);
  c.minorisation = std::move(minor);
  return c;
}

}  // namespace

Certificate atom_certificate(const Config& cfg, const EmbeddedChain& chain) {
  MinorisationCert m;
  m.x0 = 1;
  m.epsilon = 1.0;
  const auto row = chain.kernel.row(0);
  m.nu.assign(row.begin(), row.end());
  verify_minorisation(chain.kernel, m);
  return build(cfg, chain, std::move(m), 0.0, "atom");
}

Certificate smallset_certificate(const Config& cfg, const EmbeddedChain& chain) {
  if (cfg.x0 < 2) {
    throw ConfigurationError("x0 >= 2", "enlarged small set needs x0 >= 2; use the atom for x0 = 1");
  }
  MinorisationCert m = find_minorisation(chain.kernel, cfg.x0);
  verify_minorisation(chain.kernel, m);
  const double rho = cfg.traffic();
  const std::size_t n = chain.kernel.size();
  double tail = 0.0;
  for (std::size_t y = cfg.x0 + 1; y < n; ++y) {
    tail += static_cast<double>(y - cfg.x0) * chain.a[y - cfg.x0 + 1];
  }
  const double display = 1.0 + tail / (1.0 - rho);
  return build(cfg, chain, std::move(m), display, "x0=" + std::to_string(cfg.x0));
}

Certificate certificate(const Config& cfg, const EmbeddedChain& chain) {
  return cfg.x0 <= 1 ? atom_certificate(cfg, chain) : smallset_certificate(cfg, chain);
}

SolvedChain solve(Config cfg, double tail_tol, std::size_t max_truncation, unsigned threads) {
  for (;;) {
    SolvedChain s;
    s.chain = embedded_matrix(cfg, threads);
    s.pi = stationary(s.chain.kernel);
    s.pi_last = s.pi.back();
    s.config = cfg;
    if (s.pi_last < tail_tol) return s;
    if (cfg.truncation * 2 > max_truncation) {
      std::ostringstream os;
      os << "pi puts " << s.pi_last << " on the last of " << cfg.truncation
         << " states and the truncation cap " << max_truncation << " is reached";
      throw NumericError("truncation tail mass < tolerance", os.str());
    }
    cfg.truncation *= 2;
  }
}

std::vector<FigureCurve> figure_curves(const SolvedChain& solved,
                                       const std::vector<std::size_t>& x0s, std::size_t nmax,
                                       unsigned threads) {
  const std::size_t n = solved.chain.kernel.size();
  std::vector<double> support(n);
  for (std::size_t y = 0; y < n; ++y) support[y] = static_cast<double>(y);
  const YoungPair young = YoungPair::power(2.0, 0.5);
  std::vector<FigureCurve> out;
  for (std::size_t x0 : x0s) {
    Config cfg = solved.config;
    cfg.x0 = x0;
    FigureCurve fc;
    fc.rho = cfg.traffic();
    fc.x0 = x0;
    fc.cert = certificate(cfg, solved.chain);
    CurveInputs in{fc.cert.moments, fc.cert.constants, fc.cert.rate, young,
                   static_cast<double>(cfg.start_x), nmax};
    fc.curve = bound_vs_stationary(in, support, solved.pi, threads);
    fc.curve.label = fc.cert.label;
    out.push_back(std::move(fc));
  }
  return out;
}

std::optional<std::size_t> crossover(const BoundCurve& lower, const BoundCurve& upper) {
  const std::size_t m = std::min(lower.size(), upper.size());
  for (std::size_t i = 0; i < m; ++i) {
    if (lower.tv[i] < upper.tv[i]) return lower.n[i];
  }
  return std::nullopt;
}

}  // namespace mcbound::mg1
