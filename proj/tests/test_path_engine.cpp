#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "levy/errors.hpp"
#include "levy/path_engine.hpp"
#include "levy/rng.hpp"
#include "oracles.hpp"

using namespace levy;

namespace {

// Dense evaluation of Y, Z, M for a path with a single drift rate: the running
// quantities are tracked on a log-spaced grid merged with the jump times.
Extremes brute_extremes(const std::vector<JumpEvent>& ev, double drift, const NormingScale& scale, double t) {
  std::vector<double> s_pts;
  const int n = 200000;
  for (int i = 0; i <= n; ++i) s_pts.push_back(std::exp(std::log(t) * (1.0 - static_cast<double>(i) / n)));
  for (const auto& e : ev) {
    if (e.time >= t) s_pts.push_back(e.time);
  }
  std::sort(s_pts.begin(), s_pts.end());

  // running sup of X and largest jump before t
  double x = 0.0;
  double xbar = 0.0;
  double m = 0.0;
  double last = 0.0;
  std::size_t k = 0;
  auto advance = [&](double s) {
    while (k < ev.size() && ev[k].time <= s) {
      x += drift * (ev[k].time - last);
      last = ev[k].time;
      xbar = std::max(xbar, x);
      x += ev[k].size;
      xbar = std::max(xbar, x);
      m = std::max(m, ev[k].size);
      ++k;
    }
    x += drift * (s - last);
    last = s;
    xbar = std::max(xbar, x);
  };
  Extremes out{t, -1e300, -1e300, -1e300};
  for (double s : s_pts) {
    const double a = scale.a(s);
    // left limit at a jump time
    if (k < ev.size() && ev[k].time == s) {
      const double x_left = x + drift * (s - last);
      out.z = std::max(out.z, x_left / a);
    }
    advance(s);
    out.y = std::max(out.y, xbar / a);
    out.z = std::max(out.z, x / a);
    out.m = std::max(out.m, m / a);
  }
  return out;
}

struct Setup {
  NormingScale scale;
  std::shared_ptr<const ThresholdProfile> profile;
  std::unique_ptr<CenteringFunction> centering;
  std::unique_ptr<PathModel> model;
  TimeGrid grid;

  Setup(LevyMeasureSpec spec, std::shared_ptr<const ThresholdProfile> p, std::vector<double> times, bool centered)
      : scale(spec), profile(std::move(p)) {
    grid = TimeGrid::make(0.9, times);
    if (centered) centering = std::make_unique<CenteringFunction>(scale, grid.points.back());
    model = std::make_unique<PathModel>(scale, profile, centering.get());
  }
};

}  // namespace

TEST_CASE("time grid") {
  const std::vector<double> times{0.01, 0.1, 0.1};
  const auto g = TimeGrid::make(0.5, times);
  CHECK(g.report_times == std::vector<double>{0.1, 0.01});
  CHECK(g.n_max == 7);  // 0.5^7 < 0.01 <= 0.5^6
  CHECK(g.points.front() == 1.0);
  CHECK(g.points.back() == std::pow(0.5, 7));
  CHECK(std::is_sorted(g.points.rbegin(), g.points.rend()));
  CHECK(std::find(g.points.begin(), g.points.end(), 0.1) != g.points.end());
  CHECK(std::find(g.points.begin(), g.points.end(), 0.01) != g.points.end());
  CHECK_THROWS_AS(TimeGrid::make(1.0, times), ConfigError);
  CHECK_THROWS_AS(TimeGrid::make(0.5, std::vector<double>{}), ConfigError);
}

TEST_CASE("band drift") {
  const auto spec = LevyMeasureSpec::make(0.5, SlowlyVarying::constant(1.0), 0.25);
  const auto g = gamma_shifts(spec);
  // (1 - r) int_(0,eps] u Lambda(du) = 0.75 sqrt(eps) for the alpha = 1/2 power tail
  CHECK(band_drift(spec, g, 0.04) == doctest::Approx(0.75 * 0.2).epsilon(1e-9));
  CHECK(band_drift(spec, g, 1.0) == doctest::Approx(0.75 * g.plus));
}

TEST_CASE("path nodes on a hand-made jump set") {
  Setup st(LevyMeasureSpec::make(1.5, SlowlyVarying::constant(1.0)),
           std::make_shared<const ThresholdProfile>(ThresholdProfile::uniform(0.5)), {0.2}, false);
  JumpSet js;
  js.profile = st.profile;
  js.events = {{0.3, 0.75}, {0.6, -0.9}};
  const auto pf = build_path(js, *st.model, st.grid);
  const double d = st.model->drift_at(0.5);
  CHECK(d == doctest::Approx(-upper_first_moment(st.scale.spec(), 0.5)));
  CHECK(pf.nodes.back().s == 1.0);
  for (const auto& node : pf.nodes) {
    double expect = d * node.s;
    if (node.s >= 0.3) expect += 0.75;
    if (node.s >= 0.6) expect -= 0.9;
    CHECK(node.x == doctest::Approx(expect).epsilon(1e-12));
    CHECK(node.m == (node.s >= 0.3 ? 0.75 : 0.0));
    CHECK(node.a == st.scale.a(node.s));
    CHECK(node.xbar >= node.x);
  }
  const auto ex = scaled_extremes(pf, *st.model, st.grid.report_times);
  const auto brute = brute_extremes(js.events, d, st.scale, 0.2);
  CHECK(ex[0].y == doctest::Approx(brute.y).epsilon(1e-7));
  CHECK(ex[0].z == doctest::Approx(brute.z).epsilon(1e-7));
  CHECK(ex[0].m == brute.m);

  JumpSet outside = js;
  outside.events.push_back({1.5, 0.7});
  CHECK_THROWS(build_path(outside, *st.model, st.grid));
}

TEST_CASE("fast scan equals the reference scan and the dense oracle") {
  struct Cfg {
    LevyMeasureSpec spec;
    double eps;
    bool centered;
  };
  const std::vector<Cfg> cfgs{
      {LevyMeasureSpec::make(0.5, SlowlyVarying::constant(1.0), 0.3), 1e-4, false},
      {LevyMeasureSpec::make(1.5, SlowlyVarying::constant(1.0)), 2e-3, false},
      {LevyMeasureSpec::make(1.2, SlowlyVarying::log_power(1.0), 1.0), 1e-3, false},
      {LevyMeasureSpec::make(1.0, SlowlyVarying::constant(1.0)), 1e-3, true},
  };
  const std::vector<double> times{1e-1, 1e-2, 1e-3};
  for (const auto& c : cfgs) {
    Setup st(c.spec, std::make_shared<const ThresholdProfile>(ThresholdProfile::uniform(c.eps)), times, c.centered);
    for (std::size_t i = 0; i < 60; ++i) {
      RngStream rng(11, i);
      const auto js = sample_jumps(c.spec, st.profile, rng);
      const auto pf = build_path(js, *st.model, st.grid);
      const auto fast = scaled_extremes(pf, *st.model, st.grid.report_times);
      const auto ref = reference::scaled_extremes(pf, *st.model, st.grid.report_times);
      const auto mj = max_jump_extremes(js, st.scale, st.grid.report_times);
      REQUIRE(fast.size() == times.size());
      for (std::size_t k = 0; k < fast.size(); ++k) {
        CAPTURE(i);
        CHECK(fast[k].t == st.grid.report_times[k]);
        CHECK(fast[k].y == ref[k].y);
        CHECK(fast[k].z == ref[k].z);
        CHECK(fast[k].m == ref[k].m);
        CHECK(fast[k].m == mj[k]);
        CHECK(fast[k].y >= fast[k].z);
        if (k > 0) {
          CHECK(fast[k].y >= fast[k - 1].y);
          CHECK(fast[k].z >= fast[k - 1].z);
        }
      }
      if (!c.centered && i < 3) {
        const double d = st.model->drift_at(0.5);
        for (std::size_t k = 0; k < fast.size(); ++k) {
          const auto b = brute_extremes(js.events, d, st.scale, fast[k].t);
          // the dense grid can only under-shoot the exact suprema
          CHECK(b.y <= fast[k].y + 1e-9 * std::abs(fast[k].y));
          CHECK(b.y == doctest::Approx(fast[k].y).epsilon(1e-5));
          CHECK(b.z == doctest::Approx(fast[k].z).epsilon(1e-5));
          CHECK(b.m == doctest::Approx(fast[k].m).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("centered path subtracts c(s)") {
  Setup st(LevyMeasureSpec::make(1.0, SlowlyVarying::constant(1.0)),
           std::make_shared<const ThresholdProfile>(ThresholdProfile::uniform(1e-3)), {1e-2}, true);
  RngStream rng(4, 0);
  const auto js = sample_jumps(st.scale.spec(), st.profile, rng);
  const auto pf = build_path(js, *st.model, st.grid);
  CHECK(pf.centered);
  for (const auto& node : pf.nodes) {
    CHECK(node.xc == doctest::Approx(node.x - centering_c(st.scale, node.s)).epsilon(1e-9));
    CHECK(node.xcbar >= node.xc);
  }
}

TEST_CASE("report times must be path nodes") {
  Setup st(LevyMeasureSpec::make(1.5, SlowlyVarying::constant(1.0)),
           std::make_shared<const ThresholdProfile>(ThresholdProfile::uniform(0.1)), {0.2}, false);
  JumpSet js;
  js.profile = st.profile;
  const auto pf = build_path(js, *st.model, st.grid);
  CHECK_THROWS_AS(scaled_extremes(pf, *st.model, std::vector<double>{0.123456}), std::invalid_argument);
}

TEST_CASE("compensated suprema match the brute-force walk") {
  const auto spec = LevyMeasureSpec::make(1.3, SlowlyVarying::constant(1.0), 0.7);
  for (int i = 0; i < 40; ++i) {
    RngStream rng(8, i);
    auto up = sample_size_band(spec, Sign::Plus, 0.01, 0.1, 0.05, rng);
    auto down = sample_size_band(spec, Sign::Minus, 0.01, 0.1, 0.05, rng);
    std::vector<JumpEvent> ev = up;
    ev.insert(ev.end(), down.begin(), down.end());
    std::sort(ev.begin(), ev.end(), [](auto& l, auto& r) { return l.time < r.time; });
    const double drift = i % 2 ? -3.0 : 2.0;
    const std::vector<double> hs{0.05, 0.02, 0.01};
    const auto got = compensated_sups(ev, drift, hs);
    std::vector<oracle::Event> oev;
    for (const auto& e : ev) oev.push_back({e.time, e.size});
    for (std::size_t k = 0; k < hs.size(); ++k) {
      const auto [u, d] = oracle::sups(oev, drift, hs[k]);
      CHECK(got[k].up == doctest::Approx(u).epsilon(1e-12));
      CHECK(got[k].down == doctest::Approx(d).epsilon(1e-12));
    }
  }
}
