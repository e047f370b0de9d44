#include "levy/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <queue>

namespace levy::quad {

namespace {

// Globally adaptive: always bisect the panel with the largest error estimate,
// stop once the summed error meets the tolerance or the panel budget is spent.
// Recursive local schemes can split 2^depth times on integrands carrying
// rounding noise from an inner bisection; the budget bounds the work.
constexpr std::size_t kMaxPanels = 4000;

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk_panel(const Integrand& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
  return {a, b, v, err};
}

double adaptive(const Integrand& f, double a, double b, double rel_tol) {
  std::priority_queue<Panel> heap;
  Panel first = gk_panel(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  while (error > rel_tol * std::abs(total) && heap.size() < kMaxPanels) {
    const Panel p = heap.top();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) break;  // no room left to split
    heap.pop();
    const Panel l = gk_panel(f, p.a, mid);
    const Panel r = gk_panel(f, mid, p.b);
    total += l.value + r.value - p.value;
    error += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    heap.pop();
  }
  return total;
}

}  // namespace

double integrate(const Integrand& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  if (std::isinf(b)) {
    const double split = a + 64.0;
    // v = split + s / (1 - s) maps [0, 1) onto [split, inf).
    auto g = [&](double s) {
      const double w = 1.0 - s;
      const double v = split + s / w;
      const double y = f(v);
      return y == 0.0 ? 0.0 : y / (w * w);
    };
    return adaptive(f, a, split, rel_tol) + adaptive(g, 0.0, 1.0, rel_tol);
  }
  return adaptive(f, a, b, rel_tol);
}

double gauss15(const Integrand& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 15>::integrate(f, a, b);
}

}  // namespace levy::quad
