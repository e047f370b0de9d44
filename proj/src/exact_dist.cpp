#include "levy/exact_dist.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "levy/errors.hpp"
#include "levy/format.hpp"
#include "levy/quadrature.hpp"

namespace levy {

namespace {

constexpr double kIntensityTol = 1e-11;

// int_t^1 T(a(u) x) du with u = e^{-w}, split where a(u) x crosses the cutoff.
double exceedance_intensity(const NormingScale& scale, double t, double x) {
  const auto& spec = scale.spec();
  auto f = [&](double w) {
    const double u = std::exp(-w);
    return tail_above(spec, scale.a(u) * x) * u;
  };
  const double w_max = -std::log(t);
  double w_kink = 0.0;
  if (spec.bounded() && x >= 1.0) {
    // a(u) x >= 1 exactly for u >= 1 / T(1/x); nothing to integrate there.
    const double u_star = 1.0 / tail_pos(spec, 1.0 / x);
    if (u_star <= t) return 0.0;
    if (u_star < 1.0) w_kink = -std::log(u_star);
  }
  return quad::integrate(f, w_kink, w_max, kIntensityTol);
}

}  // namespace

double mt_cdf_exact(const NormingScale& scale, double t, double x) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("maximum-jump law needs t in (0,1)");
  if (!(x > 0.0)) return 0.0;
  const double at_t = t * tail_above(scale.spec(), scale.a(t) * x);
  return std::exp(-exceedance_intensity(scale, t, x) - at_t);
}

double mt_quantile(const NormingScale& scale, double t, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile level must lie in (0,1)");
  double lo = -1.0;
  double hi = 1.0;
  while (mt_cdf_exact(scale, t, std::exp(lo)) >= p) lo -= 2.0;
  while (mt_cdf_exact(scale, t, std::exp(hi)) < p) hi += 2.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mt_cdf_exact(scale, t, std::exp(mid)) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(0.5 * (lo + hi));
}

double frechet_cdf(double x, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0,2)");
  if (!(x > 0.0)) return 0.0;
  return std::exp(-std::pow(x, -alpha));
}

double stable_mt_cdf(double t, double x, double alpha) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("maximum-jump law needs t in (0,1)");
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0,2)");
  if (!(x > 0.0)) return 0.0;
  return std::exp(-std::pow(x, -alpha) * (1.0 - std::log(t)));
}

BoundValue prop1_bound_eq1(const LevyMeasureSpec& spec, double a, double b, double t, int p, Sign sign) {
  if (!(a > 0.0) || !(b > 0.0) || !(t > 0.0)) throw DomainError("bound needs a, b, t > 0");
  if (p < 1) throw DomainError("bound needs an integer p >= 1");
  const double B = trunc_second_moment(spec, a, sign);
  BoundValue out;
  if (B == 0.0) {
    out.value = 0.0;
    out.degenerate = true;
    return out;
  }
  const double log_fact = std::lgamma(p + 1.0) / p;
  const double inner = std::log(t * B) + log_fact - std::log(a * b);
  out.value = std::exp(b / ((1.0 + 1.0 / p) * a) * (1.0 + inner));
  out.vacuous = out.value > 1.0;
  return out;
}

BoundValue prop1_bound_eq2(const LevyMeasureSpec& spec, double a, double b, double t, Sign sign) {
  if (!(a > 0.0) || !(b >= 0.0) || !(t > 0.0)) throw DomainError("bound needs a, t > 0 and b >= 0");
  BoundValue out;
  if (b == 0.0) return out;
  const double B = trunc_second_moment(spec, a, sign);
  if (B == 0.0) {
    out.value = 0.0;
    out.degenerate = true;
    return out;
  }
  out.value = std::exp(-b * b / (2.0 * t * B));
  return out;
}

CdfCurve mt_cdf_curve(const NormingScale& scale, double t, std::span<const double> xs) {
  CdfCurve c;
  c.t = t;
  c.spec = scale.spec().describe();
  c.method = "quadrature";
  c.x.assign(xs.begin(), xs.end());
  std::sort(c.x.begin(), c.x.end());
  for (double x : c.x) c.value.push_back(mt_cdf_exact(scale, t, x));
  return c;
}

void write_cdf_csv(std::ostream& os, const CdfCurve& curve) {
  os << "x,F\n";
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    os << format_double(curve.x[i]) << ',' << format_double(curve.value[i]) << '\n';
  }
}

}  // namespace levy
