#include "mcbound/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <thread>

#include "mcbound/errors.hpp"
#include "mcbound/monotone.hpp"
#include "mcbound/philox.hpp"

namespace mcbound {

std::vector<double> stationary(const DiscreteKernel& k) {
  const std::size_t n = k.size();
  // Reverse reachability from state 0: a finite chain in which every state
  // leads to 0 has exactly one closed class, hence a unique pi.
  std::vector<std::vector<std::size_t>> pred(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (k(x, y) > 0.0) pred[y].push_back(x);
    }
  }
  std::vector<char> seen(n, 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const std::size_t y = queue.front();
    queue.pop_front();
    for (std::size_t x : pred[y]) {
      if (!seen[x]) {
        seen[x] = 1;
        ++reached;
        queue.push_back(x);
      }
    }
  }
  if (reached != n) {
    const auto bad = static_cast<std::size_t>(std::find(seen.begin(), seen.end(), 0) - seen.begin());
    throw CertificateError("kernel irreducible",
                           "state " + std::to_string(bad) +
                               " cannot reach state 0; the stationary law is not unique");
  }

  Eigen::MatrixXd a(n, n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) a(y, x) = k(x, y);
  }
  a -= Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd sol = a.partialPivLu().solve(b);

  std::vector<double> pi(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pi[i] = std::max(sol(i), 0.0);
    total += pi[i];
  }
  for (double& p : pi) p /= total;

  const auto next = k.left_apply(pi);
  double resid = 0.0;
  for (std::size_t i = 0; i < n; ++i) resid += std::abs(next[i] - pi[i]);
  if (resid > 1e-10) {
    std::ostringstream os;
    os << "||pi P - pi||_1 = " << resid << " after the linear solve";
    throw NumericError("stationary residual <= 1e-10", os.str());
  }
  return pi;
}

ExactTvCurve exact_tv_curve(const DiscreteKernel& k, std::size_t x,
                            const std::vector<double>& pi, std::size_t nmax,
                            TvConvention convention) {
  if (x >= k.size()) throw DomainError("state in range", "start state outside the kernel");
  const double scale = convention == TvConvention::kL1 ? 1.0 : 0.5;
  ExactTvCurve out;
  out.tv.reserve(nmax);
  std::vector<double> mu(k.size(), 0.0);
  mu[x] = 1.0;
  for (std::size_t n = 1; n <= nmax; ++n) {
    mu = k.left_apply(mu);
    double acc = 0.0;
    for (std::size_t y = 0; y < mu.size(); ++y) acc += std::abs(mu[y] - pi[y]);
    out.tv.push_back(scale * acc);
    out.boundary_mass = std::max(out.boundary_mass, mu.back());
  }
  return out;
}

DominanceReport dominance_report(const BoundCurve& bound, const std::vector<double>& exact) {
  DominanceReport rep;
  double sum = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < bound.size(); ++i) {
    const std::size_t n = bound.n[i];
    if (n == 0 || n > exact.size()) continue;
    const double margin = bound.tv[i] - exact[n - 1];
    ++rep.checked;
    sum += margin;
    if (first || margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.argmin_n = n;
      first = false;
    }
    if (margin < 0.0 && !rep.first_violation) {
      rep.first_violation = n;
      rep.pass = false;
    }
  }
  if (rep.checked) rep.mean_margin = sum / static_cast<double>(rep.checked);
  return rep;
}

namespace {

std::size_t quantile_of(const std::vector<double>& cdf, double u) {
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  if (it != cdf.end()) return static_cast<std::size_t>(it - cdf.begin());
  std::size_t y = cdf.size() - 1;
  while (y > 0 && cdf[y] == cdf[y - 1]) --y;
  return y;
}

struct Trajectory {
  double rate_sum = 0.0;
  double v_sum = 0.0;
  std::size_t coupling_time = 0;
  std::size_t visits = 0;
  bool censored = false;
};

class CoupledChain {
 public:
  CoupledChain(const DiscreteKernel& k, const MinorisationCert& cert, CouplingKind kind)
      : k_(k), q_(residual_kernel(k, cert)), cert_(cert), kind_(kind) {
    verify_minorisation(k, cert, 1e-12);
    nu_cdf_.resize(cert.nu.size());
    double acc = 0.0;
    for (std::size_t y = 0; y < cert.nu.size(); ++y) nu_cdf_[y] = acc += cert.nu[y];
  }

  bool in_cc(std::size_t x, std::size_t xp) const {
    return cert_.contains(x) && cert_.contains(xp);
  }

  // Advances (x, xp, coupled). Returns true when this step merged the pair.
  bool step(std::size_t& x, std::size_t& xp, bool& coupled, ReplicaStream& rng) const {
    if (coupled) {
      x = xp = quantile(k_, x, rng.uniform());
      return false;
    }
    if (in_cc(x, xp)) {
      if (rng.uniform() <= cert_.epsilon) {
        x = xp = quantile_of(nu_cdf_, rng.uniform());
        coupled = true;
        return true;
      }
      move(q_, x, xp, rng);
      return false;
    }
    move(k_, x, xp, rng);
    return false;
  }

 private:
  void move(const DiscreteKernel& m, std::size_t& x, std::size_t& xp, ReplicaStream& rng) const {
    const double u = rng.uniform();
    const double u2 = kind_ == CouplingKind::kOrdered ? u : rng.uniform();
    x = quantile(m, x, u);
    xp = quantile(m, xp, u2);
  }

  const DiscreteKernel& k_;
  DiscreteKernel q_;
  const MinorisationCert& cert_;
  CouplingKind kind_;
  std::vector<double> nu_cdf_;
};

template <class Fn>
void parallel_replicas(std::size_t replicas, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || replicas < 2) {
    for (std::size_t i = 0; i < replicas; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < replicas; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

void check_spec(const DiscreteKernel& k, const CouplingSpec& spec) {
  if (spec.replicas == 0) {
    throw ConfigurationError("replicas >= 1", "coupling simulation needs at least one replica");
  }
  if (spec.x >= k.size() || spec.x_prime >= k.size()) {
    throw DomainError("state in range", "coupling start pair lies outside the kernel");
  }
}

}  // namespace

CouplingEstimate simulate_coupling(const DiscreteKernel& k, const MinorisationCert& cert,
                                   const CouplingSpec& spec, const RateSequence& r,
                                   const std::function<double(std::size_t, std::size_t)>& v) {
  check_spec(k, spec);
  const CoupledChain chain(k, cert, spec.kind);
  std::vector<Trajectory> runs(spec.replicas);

  parallel_replicas(spec.replicas, spec.threads, [&](std::size_t i) {
    ReplicaStream rng(spec.seed, i);
    Trajectory& tr = runs[i];
    std::size_t x = spec.x;
    std::size_t xp = spec.x_prime;
    bool coupled = false;
    bool hit = false;
    for (std::size_t t = 0;; ++t) {
      if (!hit) {
        tr.rate_sum += r(t);
        tr.v_sum += v(x, xp);
        hit = chain.in_cc(x, xp);
      }
      if (chain.in_cc(x, xp)) ++tr.visits;
      if (chain.step(x, xp, coupled, rng)) {
        tr.coupling_time = t + 1;
        return;
      }
      if (t + 1 >= spec.step_cap) {
        tr.censored = true;
        return;
      }
    }
  });

  CouplingEstimate est;
  est.replicas = spec.replicas;
  double s1 = 0, s2 = 0, v1 = 0, v2 = 0, ct = 0;
  std::size_t done = 0;
  for (const Trajectory& tr : runs) {
    if (tr.censored) {
      ++est.censored;
      continue;
    }
    ++done;
    s1 += tr.rate_sum;
    s2 += tr.rate_sum * tr.rate_sum;
    v1 += tr.v_sum;
    v2 += tr.v_sum * tr.v_sum;
    ct += static_cast<double>(tr.coupling_time);
    if (est.visits_at_coupling.size() <= tr.visits) est.visits_at_coupling.resize(tr.visits + 1, 0);
    ++est.visits_at_coupling[tr.visits];
  }
  if (done > 0) {
    const double m = static_cast<double>(done);
    est.mean_rate_sum = s1 / m;
    est.mean_v_sum = v1 / m;
    est.mean_coupling_time = ct / m;
    if (done > 1) {
      est.se_rate_sum = std::sqrt(std::max(0.0, (s2 - m * est.mean_rate_sum * est.mean_rate_sum) / (m - 1)) / m);
      est.se_v_sum = std::sqrt(std::max(0.0, (v2 - m * est.mean_v_sum * est.mean_v_sum) / (m - 1)) / m);
    }
  }
  return est;
}

std::vector<std::size_t> coupled_marginal_counts(const DiscreteKernel& k,
                                                 const MinorisationCert& cert,
                                                 const CouplingSpec& spec, std::size_t steps) {
  check_spec(k, spec);
  const CoupledChain chain(k, cert, spec.kind);
  std::vector<std::size_t> finals(spec.replicas);
  parallel_replicas(spec.replicas, spec.threads, [&](std::size_t i) {
    ReplicaStream rng(spec.seed, i);
    std::size_t x = spec.x;
    std::size_t xp = spec.x_prime;
    bool coupled = false;
    for (std::size_t t = 0; t < steps; ++t) chain.step(x, xp, coupled, rng);
    finals[i] = x;
  });
  std::vector<std::size_t> counts(k.size(), 0);
  for (std::size_t x : finals) ++counts[x];
  return counts;
}

}  // namespace mcbound
