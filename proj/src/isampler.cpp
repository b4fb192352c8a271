#include "mcbound/isampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcbound/errors.hpp"
#include "mcbound/monotone.hpp"
#include "mcbound/quadrature.hpp"

namespace mcbound::isampler {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mean of x^(-p) over (a, b) for 0 <= a < b; infinite when a = 0 and p >= 1.
double mean_power(double a, double b, double p) {
  if (a == 0.0) return p < 1.0 ? std::pow(b, -p) / (1.0 - p) : kInf;
  if (std::abs(p - 1.0) < 1e-14) return std::log(b / a) / (b - a);
  return (std::pow(b, 1.0 - p) - std::pow(a, 1.0 - p)) / ((1.0 - p) * (b - a));
}

}  // namespace

const char* to_string(RateMode m) {
  switch (m) {
    case RateMode::kEffective: return "effective";
    case RateMode::kConservative: return "conservative";
    case RateMode::kExact: return "exact";
  }
  return "effective";
}

RateMode rate_mode_from_string(const std::string& s) {
  if (s == "effective") return RateMode::kEffective;
  if (s == "conservative") return RateMode::kConservative;
  if (s == "exact") return RateMode::kExact;
  throw ConfigurationError("rate mode in {effective, conservative, exact}",
                           "unknown rate mode '" + s + "'");
}

double psi(double r, double eta) {
  if (!(eta >= 0.0)) throw DomainError("eta >= 0", "psi is defined for eta >= 0");
  return std::min(1.0, std::pow(eta / (r + 1.0), 1.0 / r));
}

double int_u_k_closed(double r, double alpha) {
  return (r + 1.0) / (1.0 + r - r * alpha);
}

double int_min_k_closed(double r, double alpha, double eta_star) {
  const double xs = psi(r, eta_star);
  const double ra = r * alpha;
  const double head = (r + 1.0) * std::pow(xs, r - ra + 1.0) / (r - ra + 1.0);
  const double tail = std::abs(ra - 1.0) < 1e-14
                          ? -eta_star * std::log(xs)
                          : eta_star * (std::pow(xs, 1.0 - ra) - 1.0) / (ra - 1.0);
  return head + tail;
}

Constants constants(const Config& cfg) {
  const double r = cfg.r;
  const double a = cfg.alpha;
  const double eta = cfg.eta_star;
  const double top = r + 1.0;
  // K(u) = (u/(r+1))^(-alpha) and dpsi(u) = (u/(r+1))^(1/r - 1) du / (r (r+1)).
  // The u K dpsi density is folded into one power so it cannot overflow
  // next to the singular endpoint.
  auto k_dpsi = [=](double u) {
    return std::pow(u / top, 1.0 / r - 1.0 - a) / (r * top);
  };
  auto u_k_dpsi = [=](double u) { return std::pow(u / top, 1.0 / r - a) / r; };
  Constants c;
  c.x_star = psi(r, eta);
  c.epsilon = eta * (1.0 - c.x_star);
  c.int_u_k = quad::integrate_singular(u_k_dpsi, 0.0, top).value;
  c.int_min_k =
      quad::integrate_singular(u_k_dpsi, 0.0, eta).value +
      quad::integrate([&](double u) { return eta * k_dpsi(u); }, eta, top, 1e-13, 1e-13).value;
  c.phi_coeff = (1.0 - c.x_star) * top;
  c.phi0_at_1 = c.phi_coeff - c.int_min_k;
  c.k_eta = std::pow(c.x_star, -r * a);
  c.sup_pw0_on_c = c.int_u_k + c.k_eta;
  c.nu_w0 = quad::integrate([&](double x) { return std::pow(x, -r * a); }, c.x_star, 1.0,
                            1e-13, 1e-13)
                .value /
            (1.0 - c.x_star);
  return c;
}

void Config::validate() const {
  std::ostringstream os;
  if (!(r > 0.0)) {
    os << "proposal exponent r must be positive; got " << r;
    throw ConfigurationError("r > 0", os.str());
  }
  if (!(alpha > 1.0 && alpha < 1.0 + 1.0 / r)) {
    os << "alpha=" << alpha << " violates the strict inequality 1 < alpha < 1 + 1/r = "
       << 1.0 + 1.0 / r;
    throw ConfigurationError("1 < alpha < 1 + 1/r", os.str());
  }
  if (!(eta_star > 0.0 && eta_star < r + 1.0)) {
    os << "eta*=" << eta_star << " must lie in (0, r + 1) = (0, " << r + 1.0 << ")";
    throw ConfigurationError("0 < eta* < r + 1", os.str());
  }
  if (grid_n < 2) throw ConfigurationError("grid_n >= 2", "grid needs at least two cells");
  if (!(start_x > 0.0 && start_x <= 1.0)) {
    throw ConfigurationError("0 < x <= 1", "start point must lie in (0, 1]");
  }
  const Constants c = constants(*this);
  if (!(c.phi_coeff > c.int_min_k)) {
    os << "(1 - psi(eta*)) phi(1) = " << c.phi_coeff << " does not exceed int (u ^ eta*) K dpsi = "
       << c.int_min_k;
    throw ConfigurationError("(1 - psi(eta*)) phi(1) > int (u ^ eta*) K dpsi", os.str());
  }
}

PhiGenerator phi0(const Config& cfg, const Constants& c) {
  const double gamma = 1.0 - 1.0 / cfg.alpha;
  const double coeff = c.phi_coeff;
  const double shift = c.int_min_k;
  std::ostringstream name;
  name << coeff << "*v^" << gamma << " - " << shift;
  return PhiGenerator::custom([=](double v) { return coeff * std::pow(v, gamma) - shift; },
                              [=](double v) { return coeff * gamma * std::pow(v, gamma - 1.0); },
                              name.str());
}

UnivariateDriftCert drift_certificate(const Config& cfg) {
  cfg.validate();
  const Constants c = constants(cfg);
  const double ra = cfg.r * cfg.alpha;
  const double xs = c.x_star;

  UnivariateDriftCert cert;
  cert.w0 = [ra](double x) { return std::pow(x, -ra); };
  cert.phi0 = phi0(cfg, c);
  switch (cfg.rate_mode) {
    case RateMode::kEffective:
      cert.rate_phi = PhiGenerator::polynomial(c.phi_coeff, cfg.alpha);
      break;
    case RateMode::kConservative:
      cert.rate_phi = PhiGenerator::polynomial(c.phi0_at_1, cfg.alpha);
      break;
    case RateMode::kExact:
      break;
  }
  cert.small_set.contains = [xs](double x) { return x >= xs; };
  cert.small_set.epsilon = c.epsilon;
  std::ostringstream desc;
  desc << "[" << xs << ", 1]";
  cert.small_set.description = desc.str();
  cert.d0 = c.k_eta;
  cert.sup_pw0_on_c = c.sup_pw0_on_c;
  cert.nu_w0 = c.nu_w0;
  cert.sup_w0_on_c = c.k_eta;
  cert.sup_phi_w0_on_c = cert.rate_generator()(c.k_eta);
  // b0 bounds sup_C (P W0 - W0 + phi0(W0)); W0 ranges over [1, K(eta*)] on C
  // and w -> phi0(w) - w is concave, so its maximum is at the stationary
  // point clipped to that range.
  const double gamma = 1.0 - 1.0 / cfg.alpha;
  const double w_peak =
      std::clamp(std::pow(c.phi_coeff * gamma, 1.0 / (1.0 - gamma)), 1.0, c.k_eta);
  cert.b0 = std::max(0.0, c.sup_pw0_on_c + cert.phi0(w_peak) - w_peak);
  // Larger x sits lower in the order, so the join of two points is the smaller one.
  cert.join = [](double x, double xp) { return std::min(x, xp); };
  return cert;
}

SamplerResult sampler_curves(const Config& cfg, std::size_t nmax, double threshold) {
  const UnivariateDriftCert cert = drift_certificate(cfg);
  SamplerResult out;
  out.constants = constants(cfg);
  out.certified = moments_from_monotone_drift(cert);
  out.bound = make_bound_constants(out.certified.rate, out.certified.moments.b_u,
                                   out.certified.moments.b_v, out.certified.epsilon);

  // pi is uniform. C = [x*, 1] is one atom of the mixture (U = 1 there when
  // the start is in C). Below x* the cells are geometric, and each is
  // represented by the point where W0 equals its cell average: the pair
  // bounds are affine in W0 there, and min(clip, affine) is concave, so by
  // Jensen this over-estimates the TV mixture and is exact for f and g.
  const double xs = out.constants.x_star;
  const double ra = cfg.r * cfg.alpha;
  std::vector<double> edges{0.0};
  const std::size_t cells = std::max<std::size_t>(cfg.pi_cells, 2);
  const double lo = xs * 1e-14;
  for (std::size_t i = 0; i < cells; ++i) {
    edges.push_back(lo * std::pow(xs / lo, static_cast<double>(i) / static_cast<double>(cells - 1)));
  }
  edges.back() = xs;
  if (cfg.start_x > 0.0 && cfg.start_x < xs) edges.push_back(cfg.start_x);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<double> support;
  std::vector<double> weights;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i];
    const double b = edges[i + 1];
    const double mean = mean_power(a, b, ra);
    support.push_back(std::isfinite(mean) ? std::pow(mean, -1.0 / ra) : 0.0);
    weights.push_back(b - a);
  }
  support.push_back(1.0);
  weights.push_back(1.0 - xs);

  const YoungPair young = YoungPair::power(2.0, 0.5);
  CurveInputs in{out.certified.moments, out.bound, out.certified.rate, young, cfg.start_x, nmax};
  out.curve = bound_vs_stationary(in, support, weights);
  std::ostringstream label;
  label << "r=" << cfg.r << " alpha=" << cfg.alpha << " eta*=" << cfg.eta_star;
  out.curve.label = label.str();
  out.n_star = first_below(out.curve, threshold);
  return out;
}

Grid discretized_kernel(const Config& cfg) {
  cfg.validate();
  const std::size_t n = cfg.grid_n;
  const double r = cfg.r;
  const double h = 1.0 / static_cast<double>(n);
  // Work in x order (cell j = [j h, (j+1) h]) and reverse at the end.
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * h;
    const double qx = (r + 1.0) * std::pow(x, r);
    double moved = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = static_cast<double>(j) * h;
      const double b = static_cast<double>(j + 1) * h;
      // integral of min(q(y), q(x)) over [a, b]; q is increasing.
      double v;
      if (b <= x) {
        v = std::pow(b, r + 1.0) - std::pow(a, r + 1.0);
      } else if (a >= x) {
        v = qx * (b - a);
      } else {
        v = std::pow(x, r + 1.0) - std::pow(a, r + 1.0) + qx * (b - x);
      }
      rows[i][j] = v;
      if (j != i) moved += v;
    }
    rows[i][i] = 1.0 - moved;
  }
  std::vector<std::vector<double>> rev(n, std::vector<double>(n));
  Grid g;
  g.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.x[i] = (static_cast<double>(n - 1 - i) + 0.5) * h;
    for (std::size_t j = 0; j < n; ++j) rev[i][j] = rows[n - 1 - i][n - 1 - j];
  }
  g.kernel = DiscreteKernel::from_rows(std::move(rev), 1e-10);
  return g;
}

GridChecks grid_checks(const Config& cfg, const Grid& grid) {
  const Constants c = constants(cfg);
  const PhiGenerator p0 = phi0(cfg, c);
  const std::size_t n = grid.kernel.size();
  const double h = 1.0 / static_cast<double>(n);
  const double ra = cfg.r * cfg.alpha;
  GridChecks out;
  out.slack = 5.0 / static_cast<double>(n);
  out.monotone = !check_monotone(grid.kernel).has_value();

  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(grid.x[i], -ra);
  const auto pw = grid.kernel.apply(w);
  out.worst_drift_excess = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (grid.x[i] >= c.x_star) continue;
    const double excess = pw[i] - w[i] + p0(w[i]);
    if (excess > out.worst_drift_excess) {
      out.worst_drift_excess = excess;
      out.worst_drift_x = grid.x[i];
    }
  }

  // nu is uniform on [x*, 1]; its mass on a cell is the overlap length.
  std::vector<double> nu(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = grid.x[j] - 0.5 * h;
    const double b = grid.x[j] + 0.5 * h;
    nu[j] = std::max(0.0, std::min(b, 1.0) - std::max(a, c.x_star)) / (1.0 - c.x_star);
  }
  out.minorisation_shortfall = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (grid.x[i] < c.x_star) continue;
    for (std::size_t j = 0; j < n; ++j) {
      out.minorisation_shortfall =
          std::max(out.minorisation_shortfall, c.epsilon * nu[j] - grid.kernel(i, j));
    }
  }

  std::vector<double> pi(n, h);
  const auto next = grid.kernel.left_apply(pi);
  for (std::size_t j = 0; j < n; ++j) out.stationarity_residual += std::abs(next[j] - pi[j]);
  return out;
}

}  // namespace mcbound::isampler
