#include "levy/path_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "levy/errors.hpp"

namespace levy {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInvGolden = 0.6180339887498949;
constexpr int kGoldenSteps = 40;

// Linear piece X(s) = x0 + d (s - s0) on (s0, s1).
struct Segment {
  double s0;
  double s1;
  double x0;
  double d;
};

// Largest value of f over K equally spaced interior points of the segment.
// When an interior point beats both endpoint values f0, f1 the maximum is
// refined by golden-section search between its neighbours.
template <class F>
double interior_sup(const Segment& seg, int K, double f0, double f1, F&& f) {
  if (K <= 0 || !(seg.s1 > seg.s0)) return kNegInf;
  const double h = (seg.s1 - seg.s0) / (K + 1);
  double best = kNegInf;
  int k_best = 0;
  for (int k = 1; k <= K; ++k) {
    const double v = f(seg.s0 + k * h);
    if (v > best) {
      best = v;
      k_best = k;
    }
  }
  if (!(best > std::max(f0, f1))) return best;

  double lo = seg.s0 + (k_best - 1) * h;
  double hi = seg.s0 + (k_best + 1) * h;
  double p = hi - kInvGolden * (hi - lo);
  double q = lo + kInvGolden * (hi - lo);
  double fp = f(p);
  double fq = f(q);
  for (int it = 0; it < kGoldenSteps; ++it) {
    best = std::max({best, fp, fq});
    if (fp < fq) {
      lo = p;
      p = q;
      fp = fq;
      q = lo + kInvGolden * (hi - lo);
      fq = f(q);
    } else {
      hi = q;
      q = p;
      fq = fp;
      p = hi - kInvGolden * (hi - lo);
      fp = f(p);
    }
  }
  return std::max({best, fp, fq});
}

double centering_at(const PathModel& model, double s) {
  return model.centered() ? (*model.centering())(s) : 0.0;
}

// Segment ending at node i (i >= 1) of the path.
Segment segment_before(const PathFunctionals& pf, std::size_t i) {
  const auto& l = pf.nodes[i - 1];
  const auto& r = pf.nodes[i];
  return {l.s, r.s, l.x, r.drift};
}

// Does s -> X(s)/a(s) possibly increase somewhere inside the segment?
// A nonnegative, nonincreasing X over an increasing a cannot.
bool needs_interior(const PathFunctionals& pf, std::size_t i) {
  if (pf.centered) return true;
  const auto& l = pf.nodes[i - 1];
  const auto& r = pf.nodes[i];
  if (r.drift == 0.0) return false;
  return !(r.drift < 0.0 && l.x >= 0.0 && r.x_left >= 0.0);
}

double segment_ratio_sup(const PathFunctionals& pf, const PathModel& model, std::size_t i) {
  const Segment seg = segment_before(pf, i);
  const auto& l = pf.nodes[i - 1];
  const auto& r = pf.nodes[i];
  const double f0 = (pf.centered ? l.xc : l.x) / l.a;
  const double f1 = (pf.centered ? r.xc_left : r.x_left) / r.a;
  const auto& scale = model.scale();
  return interior_sup(seg, model.interior_points(), f0, f1, [&](double s) {
    return (seg.x0 + seg.d * (s - seg.s0) - centering_at(model, s)) / scale.a(s);
  });
}

// Upper bound for X(s)/a(s) on a linear segment, from its endpoint values.
double segment_ratio_bound(const PathFunctionals& pf, std::size_t i) {
  const auto& l = pf.nodes[i - 1];
  const auto& r = pf.nodes[i];
  const double top = std::max(l.x, r.x_left);
  const double ub = top > 0.0 ? top / l.a : top / r.a;
  return ub + 1e-9 * std::abs(ub);
}

std::size_t node_index(const PathFunctionals& pf, double t) {
  auto it = std::lower_bound(pf.nodes.begin(), pf.nodes.end(), t,
                             [](const PathNode& n, double s) { return n.s < s; });
  if (it == pf.nodes.end() || it->s != t) throw std::invalid_argument("report time is not a path node");
  return static_cast<std::size_t>(it - pf.nodes.begin());
}

}  // namespace

// ---------------------------------------------------------------------------
// TimeGrid and PathModel

TimeGrid TimeGrid::make(double q, std::span<const double> report_times) {
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("grid ratio q must lie in (0,1)");
  if (report_times.empty()) throw ConfigError("at least one report time is required");
  TimeGrid g;
  g.q = q;
  g.report_times.assign(report_times.begin(), report_times.end());
  for (double t : g.report_times) {
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("report times must lie in (0,1]");
  }
  std::sort(g.report_times.begin(), g.report_times.end(), std::greater<>());
  g.report_times.erase(std::unique(g.report_times.begin(), g.report_times.end()), g.report_times.end());
  g.n_max = static_cast<int>(std::ceil(std::log(g.t_min()) / std::log(q) - 1e-12));
  g.points = g.report_times;
  for (int n = 0; n <= g.n_max; ++n) g.points.push_back(std::pow(q, n));
  std::sort(g.points.begin(), g.points.end(), std::greater<>());
  g.points.erase(std::unique(g.points.begin(), g.points.end()), g.points.end());
  return g;
}

double band_drift(const LevyMeasureSpec& spec, const GammaShifts& gamma, double eps) {
  const double compensator = eps < 1.0 ? upper_first_moment(spec, eps) : 0.0;
  return (1.0 - spec.neg_ratio) * (gamma.plus - compensator);
}

PathModel::PathModel(const NormingScale& scale, std::shared_ptr<const ThresholdProfile> profile,
                     const CenteringFunction* centering, int interior_points)
    : scale_(&scale), profile_(std::move(profile)), centering_(centering), interior_(interior_points) {
  if (interior_points < 0) throw ConfigError("interior point count must be >= 0");
  const GammaShifts gamma = gamma_shifts(scale.spec());
  for (const auto& band : profile_->bands()) drift_.push_back(band_drift(scale.spec(), gamma, band.eps));
}

double PathModel::drift_at(double s) const {
  const auto bands = profile_->bands();
  auto it = std::lower_bound(bands.begin(), bands.end(), s,
                             [](const ThresholdBand& b, double v) { return b.end < v; });
  if (it == bands.end()) --it;
  return drift_[static_cast<std::size_t>(it - bands.begin())];
}

// ---------------------------------------------------------------------------
// Paths

PathFunctionals build_path(const JumpSet& jumps, const PathModel& model, const TimeGrid& grid) {
  std::vector<std::pair<double, double>> times;
  times.reserve(jumps.events.size() + grid.points.size() + model.profile().bands().size());
  for (const auto& e : jumps.events) times.emplace_back(e.time, e.size);
  for (double s : grid.points) times.emplace_back(s, 0.0);
  for (const auto& b : model.profile().bands()) times.emplace_back(b.end, 0.0);
  std::sort(times.begin(), times.end(), [](const auto& l, const auto& r) { return l.first < r.first; });

  PathFunctionals pf;
  pf.centered = model.centered();
  pf.nodes.reserve(times.size());
  const auto& scale = model.scale();
  double s_prev = 0.0;
  double x = 0.0;
  double xbar = 0.0;
  double m = 0.0;
  double xc = 0.0;
  double xcbar = 0.0;
  for (std::size_t k = 0; k < times.size();) {
    const double s = times[k].first;
    double jump = 0.0;
    for (; k < times.size() && times[k].first == s; ++k) jump += times[k].second;
    if (!(s > 0.0 && s <= 1.0)) throw ConfigError("path node outside (0,1]");

    PathNode node{};
    node.s = s;
    node.a = scale.a(s);
    node.jump = jump;
    node.drift = model.drift_at(s);
    node.x_left = x + node.drift * (s - s_prev);
    node.x = node.x_left + jump;
    xbar = std::max({xbar, node.x_left, node.x});
    if (jump > 0.0) m = std::max(m, jump);
    node.xbar = xbar;
    node.m = m;
    if (model.centered()) {
      const double c = centering_at(model, s);
      node.xc_left = node.x_left - c;
      node.xc = node.x - c;
      const Segment seg{s_prev, s, x, node.drift};
      const double inner = interior_sup(seg, model.interior_points(), xc, node.xc_left, [&](double u) {
        return seg.x0 + seg.d * (u - seg.s0) - centering_at(model, u);
      });
      xcbar = std::max({xcbar, inner, node.xc_left, node.xc});
      node.xcbar = xcbar;
      xc = node.xc;
    }
    pf.nodes.push_back(node);
    x = node.x;
    s_prev = s;
  }
  return pf;
}

std::vector<Extremes> scaled_extremes(const PathFunctionals& pf, const PathModel& model,
                                      std::span<const double> report_times) {
  const std::size_t n = pf.nodes.size();
  std::vector<std::size_t> idx(report_times.size());
  for (std::size_t k = 0; k < report_times.size(); ++k) idx[k] = node_index(pf, report_times[k]);
  std::vector<std::size_t> order(idx.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return idx[l] > idx[r]; });

  std::vector<Extremes> out(report_times.size());
  double ry = kNegInf;
  double rz = kNegInf;
  double rm = kNegInf;
  std::size_t next = 0;
  for (std::size_t i = n; i-- > 0;) {
    const auto& node = pf.nodes[i];
    const double z = (pf.centered ? node.xc : node.x) / node.a;
    const double y = (pf.centered ? node.xcbar : node.xbar) / node.a;
    rz = std::max(rz, z);
    ry = std::max({ry, y, z});
    if (node.jump > 0.0) rm = std::max(rm, node.jump / node.a);
    for (; next < order.size() && idx[order[next]] == i; ++next) {
      out[order[next]] = {node.s, ry, rz, std::max(rm, node.m / node.a)};
    }
    if (next == order.size()) break;
    if (i == 0) break;
    const double zl = (pf.centered ? node.xc_left : node.x_left) / node.a;
    rz = std::max(rz, zl);
    ry = std::max(ry, zl);
    if (needs_interior(pf, i) && (pf.centered || segment_ratio_bound(pf, i) >= rz)) {
      const double v = segment_ratio_sup(pf, model, i);
      rz = std::max(rz, v);
      ry = std::max(ry, v);
    }
  }
  return out;
}

namespace reference {

std::vector<Extremes> scaled_extremes(const PathFunctionals& pf, const PathModel& model,
                                      std::span<const double> report_times) {
  std::vector<Extremes> out;
  out.reserve(report_times.size());
  for (const double t : report_times) {
    const std::size_t j = node_index(pf, t);
    const auto& at = pf.nodes[j];
    double ry = kNegInf;
    double rz = kNegInf;
    double rm = at.m / at.a;
    for (std::size_t i = j; i < pf.nodes.size(); ++i) {
      const auto& node = pf.nodes[i];
      const double z = (pf.centered ? node.xc : node.x) / node.a;
      const double y = (pf.centered ? node.xcbar : node.xbar) / node.a;
      rz = std::max(rz, z);
      ry = std::max({ry, y, z});
      if (i == j) continue;
      if (node.jump > 0.0) rm = std::max(rm, node.jump / node.a);
      const double zl = (pf.centered ? node.xc_left : node.x_left) / node.a;
      rz = std::max(rz, zl);
      ry = std::max(ry, zl);
      if (needs_interior(pf, i)) {
        const double v = segment_ratio_sup(pf, model, i);
        rz = std::max(rz, v);
        ry = std::max(ry, v);
      }
    }
    out.push_back({t, ry, rz, rm});
  }
  return out;
}

}  // namespace reference

std::vector<double> max_jump_extremes(const JumpSet& jumps, const NormingScale& scale,
                                      std::span<const double> report_times) {
  std::vector<const JumpEvent*> positive;
  std::vector<double> own_ratio;  // y / a(u)
  for (const auto& e : jumps.events) {
    if (e.size <= 0.0) continue;
    positive.push_back(&e);
    own_ratio.push_back(e.size / scale.a(e.time));
  }
  std::vector<double> out;
  out.reserve(report_times.size());
  for (const double t : report_times) {
    const double a_t = scale.a(t);
    double best = 0.0;
    for (std::size_t k = 0; k < positive.size(); ++k) {
      best = std::max(best, positive[k]->time <= t ? positive[k]->size / a_t : own_ratio[k]);
    }
    out.push_back(best);
  }
  return out;
}

std::vector<TwoSidedSup> compensated_sups(std::span<const JumpEvent> events, double drift,
                                          std::span<const double> horizons) {
  std::vector<std::size_t> order(horizons.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return horizons[l] < horizons[r]; });

  std::vector<TwoSidedSup> out(horizons.size());
  double sum = 0.0;
  double up = 0.0;
  double down = 0.0;
  std::size_t e = 0;
  for (const std::size_t k : order) {
    const double h = horizons[k];
    for (; e < events.size() && events[e].time <= h; ++e) {
      const double before = sum + drift * events[e].time;
      sum += events[e].size;
      const double after = sum + drift * events[e].time;
      up = std::max({up, before, after});
      down = std::max({down, -before, -after});
    }
    const double end = sum + drift * h;
    out[k] = {std::max(up, end), std::max(down, -end)};
  }
  return out;
}

}  // namespace levy
