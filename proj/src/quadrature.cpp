#include "mcbound/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "mcbound/errors.hpp"

namespace mcbound::quad {
namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

constexpr int kMaxPanels = 4000;

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0;
  const double v = Kronrod::integrate(f, a, b, 0, 0.0, &err);
  return {a, b, v, err};
}

Result adapt_finite(const std::function<double(double)>& f, double a, double b,
                    double abs_tol, double rel_tol) {
  if (a == b) return {};
  std::priority_queue<Panel> heap;
  Panel first = eval_panel(f, a, b);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int panels = 1;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (panels >= kMaxPanels) {
      std::ostringstream os;
      os << "adaptive quadrature on [" << a << ", " << b
         << "] did not converge: error estimate " << total_err;
      throw NumericError("quadrature tolerance", os.str());
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel can no longer be split in double precision; accept it.
      total_err -= worst.error;
      continue;
    }
    Panel left = eval_panel(f, worst.a, mid);
    Panel right = eval_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum from the panels to avoid drift from incremental updates.
  double sum = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sum, err};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol) {
  if (std::isinf(b)) {
    // t = a + s / (1 - s), s in [0, 1).
    auto g = [&f, a](double s) {
      const double one_minus = 1.0 - s;
      if (one_minus <= 0.0) return 0.0;
      const double t = a + s / one_minus;
      return f(t) / (one_minus * one_minus);
    };
    return adapt_finite(g, 0.0, 1.0, abs_tol, rel_tol);
  }
  return adapt_finite(f, a, b, abs_tol, rel_tol);
}

Result integrate_split(const std::function<double(double)>& f, double a,
                       double b, std::span<const double> breaks,
                       double abs_tol, double rel_tol) {
  std::vector<double> pts{a};
  for (double p : breaks) {
    if (p > a && p < b) pts.push_back(p);
  }
  std::sort(pts.begin() + 1, pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  pts.push_back(b);
  const double piece_abs = abs_tol / static_cast<double>(pts.size() - 1);
  Result out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Result r = integrate(f, pts[i], pts[i + 1], piece_abs, rel_tol);
    out.value += r.value;
    out.error += r.error;
  }
  return out;
}

Result integrate_singular(const std::function<double(double)>& f, double a,
                          double b, double rel_tol) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0;
  double l1 = 0.0;
  // Boost also hands over the distance to the nearest endpoint, which stays
  // accurate where a + distance would round onto the singular endpoint.
  auto g = [&f, a, b](double x, double xc) {
    if (xc < 0.0 && x < 0.5 * (a + b)) return f(a - xc);
    if (xc > 0.0 && x > 0.5 * (a + b)) return f(b - xc);
    return f(x);
  };
  const double v = integrator.integrate(g, a, b, rel_tol, &err, &l1);
  if (!std::isfinite(v)) {
    throw NumericError("quadrature tolerance",
                       "tanh-sinh quadrature produced a non-finite value");
  }
  return {v, err};
}

}  // namespace mcbound::quad
