#pragma once

// Analytic layer for Levy measures with positive tail x^{-alpha} l(x) near 0.
//
// Internally most quantities are evaluated on the log scale L = -log x, where
// the tail reads log T(L) = alpha L + log l(e^{-L}) and is strictly increasing
// in L for every supported family.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace levy {

/// Slowly varying factor l(x) of the positive tail, for x in (0,1).
class SlowlyVarying {
 public:
  enum class Kind { Constant, LogPower, ExpLogPower, LogOverLogLog };

  static SlowlyVarying constant(double c);
  static SlowlyVarying log_power(double beta);
  static SlowlyVarying exp_log_power(double beta);
  static SlowlyVarying log_over_log_log();

  /// Parses "constant:C", "logpower:B", "explogpower:B" or "loglog".
  static SlowlyVarying parse(std::string_view text);
  std::string to_string() const;

  Kind kind() const { return kind_; }
  double param() const { return param_; }

  /// log l(e^{-L}). Throws DomainError outside the family's range.
  double log_at_neglog(double neg_log_x) const;
  double operator()(double x) const;

  /// Smallest admissible L = -log x (exclusive for LogOverLogLog).
  double min_neglog() const;
  bool defined_above_one() const { return kind_ == Kind::Constant; }

  /// Closed-form annotation: is int_0^1 y Lambda(dy) finite for this alpha?
  /// None of the families decays at 0, so this happens exactly when alpha < 1.
  bool first_moment_finite(double alpha) const { return alpha < 1.0; }

 private:
  SlowlyVarying(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

enum class Sign { Plus, Minus };

/// The Levy measure: positive tail x^{-alpha} l(x), negative tail r times it.
///
/// `cutoff` is 1 (jumps confined to [-1, 1]) or +infinity. Only the Constant
/// family may be unbounded, and it is by default: that is the pure power tail
/// for which the scaled maximum jump is exactly Frechet. With cutoff 1 the
/// tail value l(1-) at the cutoff is carried by jumps of size exactly 1.
struct LevyMeasureSpec {
  double alpha = 1.0;
  SlowlyVarying ell = SlowlyVarying::constant(1.0);
  double neg_ratio = 0.0;
  double cutoff = 1.0;

  /// Validates the parameters and checks monotonicity of the tail on a log
  /// grid and finiteness of the truncated second moment.
  static LevyMeasureSpec make(double alpha, SlowlyVarying ell, double neg_ratio = 0.0,
                              std::optional<double> cutoff = std::nullopt);

  bool bounded() const;
  /// Largest jump size at which the positive tail can be evaluated.
  double support_edge() const;
  std::string describe() const;
};

/// Positive tail Lambda_+(x) = x^{-alpha} l(x) on (0, cutoff], 0 above.
double tail_pos(const LevyMeasureSpec& spec, double x);
/// Negative tail r * Lambda_+(x).
double tail_neg(const LevyMeasureSpec& spec, double x);
/// Right-continuous tail Lambda((x, inf)): equals tail_pos below the cutoff, 0 at it.
double tail_above(const LevyMeasureSpec& spec, double x);
/// log Lambda_+(e^{-L}), valid wherever tail_pos is positive.
double log_tail_at_neglog(const LevyMeasureSpec& spec, double neg_log_x);
/// Lambda_+(1-) for bounded specs, Lambda_+(1) for unbounded ones.
double tail_at_one(const LevyMeasureSpec& spec);

inline constexpr double kDefaultInversionTol = 1e-12;

/// Generalized inverse sup{x : Lambda_+(x) > u}. Closed form for the Constant
/// family, bisection in L = -log x otherwise; `tol` bounds the relative error in x.
double phi(const LevyMeasureSpec& spec, double u, double tol = kDefaultInversionTol);

/// phi(u) when the root is known to lie in [e^{-neglog_hi}, e^{-neglog_lo}].
double phi_bracketed(const LevyMeasureSpec& spec, double u, double neglog_lo, double neglog_hi,
                     double tol = kDefaultInversionTol);

/// Norming function a(t) = phi(1/t) with a read-only table of (t, a(t)) on
/// a log grid of 16 points per decade, used to bracket the bisection.
/// Immutable after construction and safe to share across threads.
class NormingScale {
 public:
  explicit NormingScale(LevyMeasureSpec spec, double inversion_tol = kDefaultInversionTol,
                        double t_floor = 1e-20);

  const LevyMeasureSpec& spec() const { return spec_; }
  double inversion_tol() const { return tol_; }

  double a(double t) const;
  double phi(double u) const { return levy::phi(spec_, u, tol_); }

  std::span<const double> cached_times() const { return times_; }
  std::span<const double> cached_values() const { return values_; }

 private:
  LevyMeasureSpec spec_;
  double tol_;
  bool closed_form_;
  std::vector<double> times_;   // decreasing
  std::vector<double> neglog_;  // -log a(times_[k]), increasing
  std::vector<double> values_;  // a(times_[k])
};

/// B(a) = int_(0,a] y^2 Lambda(dy) (Plus) or r B(a) (Minus), for a in [0,1].
double trunc_second_moment(const LevyMeasureSpec& spec, double a, Sign sign = Sign::Plus);

/// int_(y,1] u Lambda(du) for y in (0,1]; zero for y >= 1.
double upper_first_moment(const LevyMeasureSpec& spec, double y);
/// int_(0,y] u Lambda(du); +infinity when the integral diverges (alpha >= 1).
double lower_first_moment(const LevyMeasureSpec& spec, double y);
/// Convergence test of int_(0,1] y Lambda(dy): the log-scale partial
/// integrals are doubled in length until they settle to 1e-8 relative.
bool first_moment_finite_numeric(const LevyMeasureSpec& spec);

struct GammaShifts {
  double plus = 0.0;
  double minus = 0.0;
  bool finite = false;  // int_(0,1] y Lambda(dy) < inf (same on both sides)
};

/// Shift constants gamma_+/gamma_- of the Levy-Ito decomposition.
/// Throws std::logic_error if the numeric and closed-form finiteness verdicts disagree.
GammaShifts gamma_shifts(const LevyMeasureSpec& spec);

enum class CenteringMode { General, AlphaOne };

/// c(t) = t nu(a(t)), nu(y) = gamma_+ - int_(y,1] u Lambda(du). AlphaOne
/// evaluates the two-branch alpha = 1 form directly; it agrees with General.
double centering_c(const NormingScale& scale, double t, CenteringMode mode = CenteringMode::General);

/// Tabulated int_(y,1] u Lambda(du) on v = -log y nodes of width 1/20.
/// Queries add a 15-point Gauss-Legendre panel to the nearest node.
class UpperMomentTable {
 public:
  UpperMomentTable(const LevyMeasureSpec& spec, double y_min);
  double operator()(double y) const;

 private:
  LevyMeasureSpec spec_;
  double step_;
  std::vector<double> nodes_;  // I at v = k * step_
};

/// Fast c(s) for path centering; agrees with centering_c to ~1e-13 relative.
class CenteringFunction {
 public:
  CenteringFunction(const NormingScale& scale, double t_min);
  double operator()(double s) const;

 private:
  const NormingScale* scale_;
  double gamma_plus_;
  UpperMomentTable moments_;
};

/// sup over delta in [0, Delta] of |l(t xi(t)^delta)/l(t) - 1| with
/// xi(t) = 1/(-log t), per t. The delta grid starts at 64 points and is
/// doubled until the sup moves by less than 1e-3.
std::vector<double> ssv_diagnostic(const SlowlyVarying& ell, double delta_max,
                                   std::span<const double> t_grid);

/// True when the diagnostic is identically zero or strictly decreasing along
/// the (decreasing) time grid.
bool ssv_verdict(std::span<const double> sup_deviation);

}  // namespace levy
