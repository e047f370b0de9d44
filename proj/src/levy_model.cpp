#include "levy/levy_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "levy/errors.hpp"
#include "levy/quadrature.hpp"

namespace levy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMomentTol = 1e-11;

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DomainError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

// Root of log T(L) = log_u by bisection on [lo, hi]; log T increasing in L.
double bisect_neglog(const LevyMeasureSpec& spec, double log_u, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (log_tail_at_neglog(spec, mid) < log_u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(-0.5 * (lo + hi));
}

// e^{-k v} Lambda_+(e^{-v}), evaluated in log space.
double weighted_tail(const LevyMeasureSpec& spec, double v, double k) {
  return std::exp(-k * v + log_tail_at_neglog(spec, v));
}

}  // namespace

// ---------------------------------------------------------------------------
// SlowlyVarying

SlowlyVarying SlowlyVarying::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("constant slowly varying factor needs c > 0");
  return {Kind::Constant, c};
}

SlowlyVarying SlowlyVarying::log_power(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("logpower needs beta > 0");
  return {Kind::LogPower, beta};
}

SlowlyVarying SlowlyVarying::exp_log_power(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("explogpower needs beta in (0,1)");
  return {Kind::ExpLogPower, beta};
}

SlowlyVarying SlowlyVarying::log_over_log_log() { return {Kind::LogOverLogLog, 0.0}; }

SlowlyVarying SlowlyVarying::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (name == "loglog" || name == "logoverloglog") {
    if (!arg.empty()) throw DomainError("loglog takes no parameter");
    return log_over_log_log();
  }
  if (arg.empty()) throw DomainError("slowly varying family '" + std::string(text) + "' needs a parameter");
  const double p = parse_double(arg, "slowly varying parameter");
  if (name == "constant") return constant(p);
  if (name == "logpower") return log_power(p);
  if (name == "explogpower") return exp_log_power(p);
  throw DomainError("unknown slowly varying family '" + std::string(name) + "'");
}

std::string SlowlyVarying::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Constant: os << "constant:" << param_; break;
    case Kind::LogPower: os << "logpower:" << param_; break;
    case Kind::ExpLogPower: os << "explogpower:" << param_; break;
    case Kind::LogOverLogLog: os << "loglog"; break;
  }
  return os.str();
}

double SlowlyVarying::log_at_neglog(double L) const {
  switch (kind_) {
    case Kind::Constant:
      return std::log(param_);
    case Kind::LogPower:
      if (L < 0.0) throw DomainError("logpower slowly varying factor is undefined above 1");
      return L == 0.0 ? -kInf : param_ * std::log(L);
    case Kind::ExpLogPower:
      if (L < 0.0) throw DomainError("explogpower slowly varying factor is undefined above 1");
      return std::pow(L, param_);
    case Kind::LogOverLogLog:
      if (!(L > std::numbers::e)) throw DomainError("loglog slowly varying factor needs x < e^{-e}");
      return L / std::log(L);
  }
  return 0.0;
}

double SlowlyVarying::operator()(double x) const {
  if (!(x > 0.0)) throw DomainError("slowly varying factor needs x > 0");
  return std::exp(log_at_neglog(-std::log(x)));
}

double SlowlyVarying::min_neglog() const {
  switch (kind_) {
    case Kind::Constant: return -kInf;
    case Kind::LogOverLogLog: return std::numbers::e;
    default: return 0.0;
  }
}

// ---------------------------------------------------------------------------
// LevyMeasureSpec

LevyMeasureSpec LevyMeasureSpec::make(double alpha, SlowlyVarying ell, double neg_ratio,
                                      std::optional<double> cutoff) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0,2)");
  if (!(neg_ratio >= 0.0) || !std::isfinite(neg_ratio)) throw DomainError("neg_ratio must be >= 0");
  LevyMeasureSpec spec;
  spec.alpha = alpha;
  spec.ell = ell;
  spec.neg_ratio = neg_ratio;
  spec.cutoff = cutoff.value_or(ell.defined_above_one() ? kInf : 1.0);
  if (spec.cutoff != 1.0 && spec.cutoff != kInf) throw DomainError("cutoff must be 1 or inf");
  if (std::isinf(spec.cutoff) && !ell.defined_above_one()) {
    throw DomainError(ell.to_string() + " is undefined above 1; use cutoff 1");
  }

  // Tail strictly decreasing in x <=> log T strictly increasing in L.
  const double l0 = std::max(0.0, ell.min_neglog());
  double prev = -kInf;
  for (int k = 1; k <= 2000; ++k) {
    const double L = l0 + 0.1 * k;
    const double cur = log_tail_at_neglog(spec, L);
    if (!(cur > prev)) throw DomainError("tail is not strictly decreasing for " + spec.describe());
    prev = cur;
  }
  const double edge = ell.kind() == SlowlyVarying::Kind::LogOverLogLog ? std::exp(-l0 - 1e-3) : 1.0;
  const double b = trunc_second_moment(spec, edge);
  if (!std::isfinite(b) || b < 0.0) throw DomainError("second moment of the Levy measure is not finite");
  return spec;
}

bool LevyMeasureSpec::bounded() const { return std::isfinite(cutoff); }

double LevyMeasureSpec::support_edge() const {
  if (ell.kind() == SlowlyVarying::Kind::LogOverLogLog) return std::exp(-std::numbers::e);
  return cutoff;
}

std::string LevyMeasureSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "alpha=" << alpha << " ell=" << ell.to_string() << " neg_ratio=" << neg_ratio
     << " cutoff=" << (bounded() ? "1" : "inf");
  return os.str();
}

// ---------------------------------------------------------------------------
// Tails and inverse

double log_tail_at_neglog(const LevyMeasureSpec& spec, double L) {
  return spec.alpha * L + spec.ell.log_at_neglog(L);
}

double tail_pos(const LevyMeasureSpec& spec, double x) {
  if (!(x > 0.0)) throw DomainError("tail needs x > 0");
  if (x > spec.cutoff) return 0.0;
  return std::exp(log_tail_at_neglog(spec, -std::log(x)));
}

double tail_neg(const LevyMeasureSpec& spec, double x) {
  const double t = tail_pos(spec, x);
  return spec.neg_ratio * t;
}

double tail_above(const LevyMeasureSpec& spec, double x) {
  if (spec.bounded() && x >= spec.cutoff) return 0.0;
  return tail_pos(spec, x);
}

double tail_at_one(const LevyMeasureSpec& spec) {
  return std::exp(log_tail_at_neglog(spec, 0.0));
}

double phi(const LevyMeasureSpec& spec, double u, double tol) {
  if (!(u > 0.0)) throw DomainError("phi needs u > 0");
  if (spec.ell.kind() == SlowlyVarying::Kind::Constant) {
    const double c = spec.ell.param();
    if (spec.bounded() && u <= c) return 1.0;
    return std::pow(u / c, -1.0 / spec.alpha);
  }
  const double log_u = std::log(u);
  const double lo = spec.ell.min_neglog();
  if (log_u <= log_tail_at_neglog(spec, std::nextafter(lo, kInf))) {
    if (spec.ell.kind() == SlowlyVarying::Kind::LogOverLogLog) {
      throw DomainError("phi: level below the tail range of the loglog family");
    }
    return 1.0;
  }
  double hi = lo + 1.0;
  while (log_tail_at_neglog(spec, hi) < log_u) {
    hi = lo + 2.0 * (hi - lo);
    if (hi > 1e6) throw DomainError("phi: level too large to invert");
  }
  return bisect_neglog(spec, log_u, lo, hi, tol);
}

double phi_bracketed(const LevyMeasureSpec& spec, double u, double lo, double hi, double tol) {
  if (!(u > 0.0)) throw DomainError("phi needs u > 0");
  const double log_u = std::log(u);
  if (log_tail_at_neglog(spec, lo) >= log_u) return std::exp(-lo);
  return bisect_neglog(spec, log_u, lo, hi, tol);
}

// ---------------------------------------------------------------------------
// NormingScale

NormingScale::NormingScale(LevyMeasureSpec spec, double inversion_tol, double t_floor)
    : spec_(std::move(spec)),
      tol_(inversion_tol),
      closed_form_(spec_.ell.kind() == SlowlyVarying::Kind::Constant) {
  if (!(inversion_tol > 0.0)) throw DomainError("inversion tolerance must be positive");
  if (closed_form_) return;
  for (int k = 0;; ++k) {
    const double t = std::pow(10.0, -k / 16.0);
    if (t < t_floor) break;
    double a_t = 0.0;
    try {
      a_t = levy::phi(spec_, 1.0 / t, tol_);
    } catch (const DomainError&) {
      continue;  // loglog family: level not yet inside the tail range
    }
    times_.push_back(t);
    values_.push_back(a_t);
    neglog_.push_back(-std::log(a_t));
  }
}

double NormingScale::a(double t) const {
  if (!(t > 0.0)) throw DomainError("norming function needs t > 0");
  const double u = 1.0 / t;
  if (closed_form_ || times_.empty() || t > times_.front() || t < times_.back()) {
    return levy::phi(spec_, u, tol_);
  }
  // times_ is decreasing: find k with times_[k] >= t > times_[k+1].
  const auto it = std::lower_bound(times_.begin(), times_.end(), t, std::greater<>());
  const auto k = static_cast<std::size_t>(it - times_.begin());
  if (times_[k] == t) return values_[k];
  const double pad = 4.0 * tol_;
  const double lo = std::max(neglog_[k - 1] - pad, std::nextafter(spec_.ell.min_neglog(), kInf));
  const double hi = neglog_[k] + pad;
  return phi_bracketed(spec_, u, lo, hi, tol_);
}

// ---------------------------------------------------------------------------
// Moments

double trunc_second_moment(const LevyMeasureSpec& spec, double a, Sign sign) {
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("truncated second moment needs a in [0,1]");
  if (a == 0.0) return 0.0;
  if (sign == Sign::Minus && spec.neg_ratio == 0.0) return 0.0;
  const double La = -std::log(a);
  const double integral =
      quad::integrate([&](double v) { return weighted_tail(spec, v, 2.0); }, La, kInf, kMomentTol);
  const double b = 2.0 * integral - a * a * tail_above(spec, a);
  return sign == Sign::Plus ? b : spec.neg_ratio * b;
}

double upper_first_moment(const LevyMeasureSpec& spec, double y) {
  if (!(y > 0.0)) throw DomainError("upper first moment needs y > 0");
  if (y >= 1.0) return 0.0;
  const double Ly = -std::log(y);
  const double integral =
      quad::integrate([&](double v) { return weighted_tail(spec, v, 1.0); }, 0.0, Ly, kMomentTol);
  return integral + y * tail_pos(spec, y) - tail_above(spec, 1.0);
}

double lower_first_moment(const LevyMeasureSpec& spec, double y) {
  if (!(y >= 0.0 && y <= 1.0)) throw DomainError("lower first moment needs y in [0,1]");
  if (y == 0.0) return 0.0;
  if (!spec.ell.first_moment_finite(spec.alpha)) return kInf;
  const double Ly = -std::log(y);
  const double integral =
      quad::integrate([&](double v) { return weighted_tail(spec, v, 1.0); }, Ly, kInf, kMomentTol);
  return integral - y * tail_above(spec, y);
}

bool first_moment_finite_numeric(const LevyMeasureSpec& spec) {
  const double v0 = std::max(0.0, spec.ell.min_neglog());
  auto f = [&](double v) { return weighted_tail(spec, v, 1.0); };
  double span = 64.0;
  double partial = quad::integrate(f, v0, v0 + span, kMomentTol);
  if (!std::isfinite(partial)) return false;
  while (span < 1073741824.0) {
    const double inc = quad::integrate(f, v0 + span, v0 + 2.0 * span, kMomentTol);
    if (!std::isfinite(inc)) return false;
    partial += inc;
    if (inc <= 1e-8 * partial) return true;
    span *= 2.0;
  }
  return false;
}

GammaShifts gamma_shifts(const LevyMeasureSpec& spec) {
  const bool analytic = spec.ell.first_moment_finite(spec.alpha);
  const bool numeric = first_moment_finite_numeric(spec);
  if (analytic != numeric) {
    throw std::logic_error("first-moment finiteness: closed form and quadrature disagree for " +
                           spec.describe());
  }
  GammaShifts g;
  g.finite = analytic;
  if (g.finite) {
    g.plus = lower_first_moment(spec, 1.0);
    g.minus = -spec.neg_ratio * g.plus;
  }
  return g;
}

double centering_c(const NormingScale& scale, double t, CenteringMode mode) {
  if (!(t > 0.0)) throw DomainError("centering needs t > 0");
  const auto& spec = scale.spec();
  const double a_t = scale.a(t);
  const GammaShifts g = gamma_shifts(spec);
  if (mode == CenteringMode::AlphaOne) {
    return g.finite ? t * lower_first_moment(spec, a_t) : -t * upper_first_moment(spec, a_t);
  }
  // With a finite first moment nu(a) = int_(0,a] u Lambda(du); integrating that
  // directly avoids the cancellation in gamma_+ - int_(a,1] at small a.
  if (g.finite) return t * lower_first_moment(spec, a_t);
  return t * (g.plus - upper_first_moment(spec, a_t));
}

UpperMomentTable::UpperMomentTable(const LevyMeasureSpec& spec, double y_min)
    : spec_(spec), step_(0.05) {
  if (!(y_min > 0.0 && y_min < 1.0)) throw DomainError("moment table needs y_min in (0,1)");
  const auto count = static_cast<std::size_t>(std::ceil(-std::log(y_min) / step_)) + 2;
  nodes_.reserve(count);
  nodes_.push_back(0.0);
  auto f = [&](double v) { return weighted_tail(spec_, v, 1.0); };
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double v0 = static_cast<double>(k) * step_;
    const double v1 = static_cast<double>(k + 1) * step_;
    const double y0 = std::exp(-v0);
    const double y1 = std::exp(-v1);
    const double panel = quad::integrate(f, v0, v1, 1e-13);
    nodes_.push_back(nodes_.back() + y1 * tail_pos(spec_, y1) - y0 * tail_above(spec_, y0) + panel);
  }
}

double UpperMomentTable::operator()(double y) const {
  if (!(y > 0.0)) throw DomainError("upper first moment needs y > 0");
  if (y >= 1.0) return 0.0;
  const double v = -std::log(y);
  const auto k = static_cast<std::size_t>(v / step_);
  if (k + 1 >= nodes_.size()) return upper_first_moment(spec_, y);
  const double vk = static_cast<double>(k) * step_;
  const double yk = std::exp(-vk);
  const double panel = quad::gauss15([&](double w) { return weighted_tail(spec_, w, 1.0); }, vk, v);
  return nodes_[k] + y * tail_pos(spec_, y) - yk * tail_above(spec_, yk) + panel;
}

CenteringFunction::CenteringFunction(const NormingScale& scale, double t_min)
    : scale_(&scale),
      gamma_plus_(gamma_shifts(scale.spec()).plus),
      moments_(scale.spec(), std::min(0.5, scale.a(t_min) * 1e-3)) {}

double CenteringFunction::operator()(double s) const {
  if (s <= 0.0) return 0.0;
  return s * (gamma_plus_ - moments_(scale_->a(s)));
}

// ---------------------------------------------------------------------------
// Super-slow variation

std::vector<double> ssv_diagnostic(const SlowlyVarying& ell, double delta_max,
                                   std::span<const double> t_grid) {
  if (!(delta_max > 0.0)) throw DomainError("ssv diagnostic needs Delta > 0");
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (const double t : t_grid) {
    if (!(t > 0.0 && t < std::exp(-1.0))) throw DomainError("ssv diagnostic needs t < e^{-1}");
    const double L = -std::log(t);
    const double base = ell.log_at_neglog(L);
    const double log_L = std::log(L);
    auto sup_on = [&](int n) {
      double sup = 0.0;
      for (int j = 0; j < n; ++j) {
        const double delta = delta_max * j / (n - 1);
        sup = std::max(sup, std::abs(std::expm1(ell.log_at_neglog(L + delta * log_L) - base)));
      }
      return sup;
    };
    int n = 64;
    double sup = sup_on(n);
    while (n < (1 << 16)) {
      n = 2 * (n - 1) + 1;
      const double refined = sup_on(n);
      const bool settled = std::abs(refined - sup) < 1e-3;
      sup = refined;
      if (settled) break;
    }
    out.push_back(sup);
  }
  return out;
}

bool ssv_verdict(std::span<const double> dev) {
  if (std::all_of(dev.begin(), dev.end(), [](double v) { return v <= 1e-12; })) return true;
  for (std::size_t i = 1; i < dev.size(); ++i) {
    if (!(dev[i] < dev[i - 1])) return false;
  }
  return true;
}

}  // namespace levy
