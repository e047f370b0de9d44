#pragma once

// Exact law of the scaled maximum jump and the explicit exponential bounds
// for truncated compensated jump processes.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "levy/levy_model.hpp"

namespace levy {

/// P(M_t <= x) = exp{-int_t^1 T(a(u) x) du - t T(a(t) x)}, T the positive
/// tail. Returns 0 for x <= 0. Throws DomainError unless 0 < t < 1.
double mt_cdf_exact(const NormingScale& scale, double t, double x);

/// Level x with P(M_t <= x) = p, by bisection on log x (relative tol 1e-12).
double mt_quantile(const NormingScale& scale, double t, double p);

/// exp(-x^{-alpha}); 0 for x <= 0.
double frechet_cdf(double x, double alpha);

/// Closed form for the pure power tail: exp{-x^{-alpha} (1 - log t)}.
double stable_mt_cdf(double t, double x, double alpha);

struct BoundValue {
  double value = 1.0;
  bool vacuous = false;     // value > 1: carries no information
  bool degenerate = false;  // B = 0: the truncated process vanishes
};

/// exp{ b/((1+1/p) a) (1 + log(t B (p!)^{1/p} / (a b))) } with B = B(a) or B(-a).
BoundValue prop1_bound_eq1(const LevyMeasureSpec& spec, double a, double b, double t, int p,
                           Sign sign = Sign::Plus);

/// exp{ -b^2 / (2 t B) } with B = B(a) or B(-a).
BoundValue prop1_bound_eq2(const LevyMeasureSpec& spec, double a, double b, double t,
                           Sign sign = Sign::Plus);

struct CdfCurve {
  double t = 0.0;
  std::string spec;
  std::string method;
  std::vector<double> x;
  std::vector<double> value;
};

CdfCurve mt_cdf_curve(const NormingScale& scale, double t, std::span<const double> xs);
void write_cdf_csv(std::ostream& os, const CdfCurve& curve);

}  // namespace levy
