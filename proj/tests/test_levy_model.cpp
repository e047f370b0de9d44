#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "levy/errors.hpp"
#include "levy/levy_model.hpp"
#include "oracles.hpp"

using namespace levy;

namespace {

struct Case {
  SlowlyVarying ell;
  oracle::Family family;
  double param;
};

std::vector<Case> families() {
  return {{SlowlyVarying::constant(1.0), oracle::Family::Constant, 1.0},
          {SlowlyVarying::constant(2.5), oracle::Family::Constant, 2.5},
          {SlowlyVarying::log_power(1.0), oracle::Family::LogPower, 1.0},
          {SlowlyVarying::exp_log_power(0.5), oracle::Family::ExpLogPower, 0.5},
          {SlowlyVarying::log_over_log_log(), oracle::Family::LogLog, 0.0}};
}

}  // namespace

TEST_CASE("slowly varying factors parse and print") {
  CHECK(SlowlyVarying::parse("constant:2").kind() == SlowlyVarying::Kind::Constant);
  CHECK(SlowlyVarying::parse("constant:2").param() == 2.0);
  CHECK(SlowlyVarying::parse("logpower:1.5").kind() == SlowlyVarying::Kind::LogPower);
  CHECK(SlowlyVarying::parse("explogpower:0.5").kind() == SlowlyVarying::Kind::ExpLogPower);
  CHECK(SlowlyVarying::parse("loglog").kind() == SlowlyVarying::Kind::LogOverLogLog);
  for (const auto& c : families()) {
    const auto round = SlowlyVarying::parse(c.ell.to_string());
    CHECK(round.kind() == c.ell.kind());
    CHECK(round.param() == c.ell.param());
  }
  CHECK_THROWS(SlowlyVarying::parse("cauchy:1"));
  CHECK_THROWS(SlowlyVarying::parse("logpower:"));
  CHECK_THROWS(SlowlyVarying::parse("constant:-1"));
}

TEST_CASE("loglog factor is only defined below e^{-e}") {
  const auto ell = SlowlyVarying::log_over_log_log();
  CHECK_THROWS_AS(ell(0.1), DomainError);
  CHECK_THROWS_AS(ell(std::exp(-std::numbers::e)), DomainError);
  CHECK(ell(1e-3) == doctest::Approx(std::exp(std::log(1e3) / std::log(std::log(1e3)))));
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(LevyMeasureSpec::make(2.0, SlowlyVarying::constant(1)), DomainError);
  CHECK_THROWS_AS(LevyMeasureSpec::make(0.0, SlowlyVarying::constant(1)), DomainError);
  CHECK_THROWS_AS(LevyMeasureSpec::make(1.0, SlowlyVarying::constant(1), -0.5), DomainError);
  CHECK_THROWS(LevyMeasureSpec::make(1.0, SlowlyVarying::log_power(1), 0.0, std::numeric_limits<double>::infinity()));
  CHECK_THROWS(LevyMeasureSpec::make(1.0, SlowlyVarying::constant(1), 0.0, 0.5));
  CHECK_FALSE(LevyMeasureSpec::make(1.0, SlowlyVarying::constant(1)).bounded());
  CHECK(LevyMeasureSpec::make(1.0, SlowlyVarying::log_power(1)).bounded());
  CHECK(LevyMeasureSpec::make(1.0, SlowlyVarying::constant(1), 0.0, 1.0).bounded());
}

TEST_CASE("tails match the closed forms") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    for (const auto& c : families()) {
      const auto spec = LevyMeasureSpec::make(alpha, c.ell, 0.3);
      const oracle::Tail T{alpha, c.family, c.param, spec.bounded()};
      for (double x : {1e-9, 1e-5, 1e-2, 0.05}) {
        CAPTURE(x);
        CHECK(tail_pos(spec, x) == doctest::Approx(T(x)).epsilon(1e-12));
        CHECK(tail_neg(spec, x) == doctest::Approx(0.3 * T(x)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("bounded tails carry an atom at the cutoff") {
  const auto spec = LevyMeasureSpec::make(1.0, SlowlyVarying::log_power(1));
  CHECK(tail_above(spec, 1.0) == 0.0);
  CHECK(tail_above(spec, 2.0) == 0.0);
  CHECK(tail_at_one(spec) == doctest::Approx(0.0).epsilon(1e-12));  // l(1-) = 0 for logpower
  const auto flat = LevyMeasureSpec::make(0.7, SlowlyVarying::constant(3.0), 0.0, 1.0);
  CHECK(tail_at_one(flat) == doctest::Approx(3.0));
  CHECK(tail_above(flat, 1.0) == 0.0);
  CHECK(tail_above(flat, std::nextafter(1.0, 0.0)) == doctest::Approx(3.0));
  const auto open = LevyMeasureSpec::make(0.7, SlowlyVarying::constant(3.0));
  CHECK(tail_above(open, 4.0) == doctest::Approx(3.0 * std::pow(4.0, -0.7)));
}

TEST_CASE("generalized inverse") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    for (const auto& c : families()) {
      const auto spec = LevyMeasureSpec::make(alpha, c.ell);
      for (double u : {1e2, 1e5, 1e9, 1e14}) {
        if (c.family == oracle::Family::LogLog && u < 1e5) {
          CHECK_THROWS_AS(phi(spec, 1.0), DomainError);
          continue;
        }
        const double x = phi(spec, u);
        CAPTURE(u);
        CHECK(tail_pos(spec, x) == doctest::Approx(u).epsilon(1e-10));
      }
    }
  }
  // u at or below the mass above the cutoff region maps to the cutoff.
  const auto flat = LevyMeasureSpec::make(1.0, SlowlyVarying::constant(2.0), 0.0, 1.0);
  CHECK(phi(flat, 1.0) == 1.0);
  CHECK(phi(flat, 2.0) == 1.0);
  const auto open = LevyMeasureSpec::make(1.0, SlowlyVarying::constant(2.0));
  CHECK(phi(open, 0.5) == doctest::Approx(4.0));
}

TEST_CASE("norming scale solves t T(a(t)) = 1") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    for (const auto& c : families()) {
      const auto spec = LevyMeasureSpec::make(c.family == oracle::Family::LogLog ? 0.5 : alpha, c.ell);
      const NormingScale scale(spec);
      const oracle::Tail T{spec.alpha, c.family, c.param, spec.bounded()};
      for (double t : {1e-2, 3.3e-5, 1e-8, 1e-12}) {
        CAPTURE(t);
        const double a = scale.a(t);
        CHECK(std::abs(t * tail_pos(spec, a) - 1.0) < 1e-9);
        CHECK(a == doctest::Approx(oracle::norming(T, t)).epsilon(1e-9));
        CHECK(a == doctest::Approx(phi(spec, 1.0 / t)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("truncated second moment") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    const auto spec = LevyMeasureSpec::make(alpha, SlowlyVarying::constant(1.0));
    for (double a : {1e-6, 1e-3, 0.5}) {
      CHECK(trunc_second_moment(spec, a) == doctest::Approx(alpha / (2 - alpha) * std::pow(a, 2 - alpha)).epsilon(1e-9));
    }
  }
  for (const auto& c : families()) {
    const auto spec = LevyMeasureSpec::make(1.2, c.ell, 2.0);
    const oracle::Tail T{1.2, c.family, c.param, spec.bounded()};
    for (double a : {1e-6, 1e-3, 0.04}) {
      CAPTURE(a);
      CHECK(trunc_second_moment(spec, a) == doctest::Approx(oracle::trunc_second_moment(T, a)).epsilon(1e-7));
      CHECK(trunc_second_moment(spec, a, Sign::Minus) == doctest::Approx(2.0 * trunc_second_moment(spec, a)));
    }
  }
  // Karamata: B(a) / (a^2 T(a)) -> alpha / (2 - alpha); for logpower(1) and
  // alpha = 1.5 the ratio is 3 + 8 / (-log a) exactly.
  const auto lp = LevyMeasureSpec::make(1.5, SlowlyVarying::log_power(1.0));
  for (double a : {1e-4, 1e-12}) {
    CHECK(trunc_second_moment(lp, a) / (a * a * tail_pos(lp, a)) == doctest::Approx(3.0 - 8.0 / std::log(a)).epsilon(1e-9));
  }
}

TEST_CASE("first moments") {
  for (double alpha : {0.5, 1.5}) {
    const auto spec = LevyMeasureSpec::make(alpha, SlowlyVarying::constant(1.0));
    for (double y : {1e-6, 1e-2, 0.3}) {
      const double expect = alpha * (1 - std::pow(y, 1 - alpha)) / (1 - alpha);
      CHECK(upper_first_moment(spec, y) == doctest::Approx(expect).epsilon(1e-10));
    }
    // the bounded variant adds the atom at 1
    const auto bounded = LevyMeasureSpec::make(alpha, SlowlyVarying::constant(1.0), 0.0, 1.0);
    CHECK(upper_first_moment(bounded, 0.01) == doctest::Approx(upper_first_moment(spec, 0.01) + 1.0).epsilon(1e-10));
  }
  CHECK(upper_first_moment(LevyMeasureSpec::make(0.5, SlowlyVarying::constant(1.0)), 1.0) == 0.0);
  const auto half = LevyMeasureSpec::make(0.5, SlowlyVarying::constant(1.0));
  CHECK(lower_first_moment(half, 0.25) == doctest::Approx(0.5 / 0.5 * std::sqrt(0.25)).epsilon(1e-9));
  CHECK(std::isinf(lower_first_moment(LevyMeasureSpec::make(1.0, SlowlyVarying::constant(1.0)), 0.5)));
}

TEST_CASE("first-moment finiteness agrees with the closed form") {
  for (double alpha : {0.4, 0.9, 1.0, 1.3}) {
    for (const auto& c : families()) {
      const auto spec = LevyMeasureSpec::make(alpha, c.ell);
      CAPTURE(alpha);
      if (c.family == oracle::Family::LogLog && alpha < 1.0) {
        // the factor is undefined on [e^{-e}, 1], so is the integral over (0,1]
        CHECK_THROWS_AS(gamma_shifts(spec), DomainError);
        continue;
      }
      CHECK(first_moment_finite_numeric(spec) == spec.ell.first_moment_finite(spec.alpha));
      const auto g = gamma_shifts(spec);
      CHECK(g.finite == (spec.alpha < 1.0));
    }
  }
  const auto spec = LevyMeasureSpec::make(0.5, SlowlyVarying::constant(1.0), 0.25, 1.0);
  const auto g = gamma_shifts(spec);
  // gamma_+ integrates over (0,1], so the atom at the cutoff counts
  CHECK(g.plus == doctest::Approx(0.5 / 0.5 + 1.0));
  CHECK(g.minus == doctest::Approx(-0.25 * g.plus));
  CHECK(gamma_shifts(LevyMeasureSpec::make(1.5, SlowlyVarying::constant(1.0))).plus == 0.0);
}

TEST_CASE("centering approaches alpha/(1-alpha) a(t)") {
  for (double alpha : {0.5, 1.5}) {
    const NormingScale scale(LevyMeasureSpec::make(alpha, SlowlyVarying::constant(1.0)));
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 2; k <= 8; ++k) {
      const double t = std::pow(10.0, -k);
      const double gap = std::abs(centering_c(scale, t) / scale.a(t) - alpha / (1 - alpha));
      CHECK(gap <= prev + 1e-13);
      prev = gap;
    }
  }
  // Closed form for the pure power tail with alpha = 0.5: c(t)/a(t) = 1 exactly.
  const NormingScale half(LevyMeasureSpec::make(0.5, SlowlyVarying::constant(1.0)));
  CHECK(centering_c(half, 1e-4) / half.a(1e-4) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("centering modes and the fast table agree") {
  const NormingScale one(LevyMeasureSpec::make(1.0, SlowlyVarying::constant(1.0)));
  for (double t : {1e-1, 1e-3, 1e-6}) {
    CHECK(centering_c(one, t, CenteringMode::AlphaOne) == doctest::Approx(centering_c(one, t)).epsilon(1e-10));
  }
  const NormingScale lp(LevyMeasureSpec::make(1.0, SlowlyVarying::log_power(1.0), 0.5));
  const CenteringFunction fast(lp, 1e-7);
  for (double s : {0.9, 0.37, 1e-3, 2.2e-5, 1e-7}) {
    CAPTURE(s);
    CHECK(fast(s) == doctest::Approx(centering_c(lp, s)).epsilon(1e-11));
  }
}

TEST_CASE("super-slow-variation diagnostic") {
  std::vector<double> ts;
  for (int k = 4; k <= 16; ++k) ts.push_back(std::pow(10.0, -k));
  CHECK(ssv_verdict(ssv_diagnostic(SlowlyVarying::constant(1.0), 2.0, ts)));
  CHECK(ssv_verdict(ssv_diagnostic(SlowlyVarying::log_power(1.0), 2.0, ts)));
  CHECK(ssv_verdict(ssv_diagnostic(SlowlyVarying::exp_log_power(0.5), 2.0, ts)));
  CHECK_FALSE(ssv_verdict(ssv_diagnostic(SlowlyVarying::log_over_log_log(), 2.0, ts)));
  // Closed form for logpower(1): sup over delta of |1 - delta log(-log t)/(-log t)|-deviation.
  const double t = 1e-8;
  const double L = -std::log(t);
  const auto dev = ssv_diagnostic(SlowlyVarying::log_power(1.0), 2.0, std::vector<double>{t});
  CHECK(dev[0] == doctest::Approx(2.0 * std::log(L) / L).epsilon(1e-3));
  CHECK_THROWS(ssv_diagnostic(SlowlyVarying::constant(1.0), 2.0, std::vector<double>{0.5}));
}
