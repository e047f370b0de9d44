#include "levy/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "levy/errors.hpp"
#include "levy/format.hpp"

namespace levy {

namespace {

// Jumps at exactly the cutoff (the atom of a bounded tail) must stay above
// every threshold, so the truncation level never reaches it.
constexpr double kMaxEps = 0.5;

void require_simulable(const LevyMeasureSpec& spec) {
  if (spec.support_edge() < spec.cutoff && spec.support_edge() < 1.0) {
    throw ConfigError(spec.ell.to_string() + " has no tail near the cutoff; cannot simulate jumps");
  }
}

struct Draft {
  double time;
  double size;
  std::size_t band;
};

double draw_size(const LevyMeasureSpec& spec, double tail_lo, double tail_hi, RngStream& rng) {
  // P(size > y) = (T(y) - T(hi)) / (T(lo) - T(hi)) for y in (lo, hi].
  const double u = tail_hi + rng.uniform() * (tail_lo - tail_hi);
  return phi(spec, u);
}

}  // namespace

// ---------------------------------------------------------------------------
// ThresholdProfile

ThresholdProfile ThresholdProfile::uniform(double eps) {
  if (!(eps > 0.0)) throw DomainError("jump threshold must be positive");
  ThresholdProfile p;
  p.bands_.push_back({0.0, 1.0, eps});
  return p;
}

ThresholdProfile ThresholdProfile::banded(std::vector<ThresholdBand> bands) {
  if (bands.empty()) throw ConfigError("threshold profile needs at least one band");
  std::sort(bands.begin(), bands.end(), [](const auto& l, const auto& r) { return l.begin < r.begin; });
  if (bands.front().begin != 0.0 || bands.back().end != 1.0) {
    throw ConfigError("threshold bands must cover (0, 1]");
  }
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (!(bands[i].eps > 0.0)) throw ConfigError("threshold bands need eps > 0");
    if (!(bands[i].end > bands[i].begin)) throw ConfigError("empty threshold band");
    if (i > 0 && bands[i].begin != bands[i - 1].end) throw ConfigError("threshold bands must be contiguous");
  }
  ThresholdProfile p;
  p.bands_ = std::move(bands);
  return p;
}

double ThresholdProfile::eps_at(double time) const {
  auto it = std::lower_bound(bands_.begin(), bands_.end(), time,
                             [](const ThresholdBand& b, double s) { return b.end < s; });
  if (it == bands_.end()) --it;
  return it->eps;
}

double ThresholdProfile::min_eps() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : bands_) m = std::min(m, b.eps);
  return m;
}

double ThresholdProfile::expected_count(const LevyMeasureSpec& spec) const {
  double total = 0.0;
  for (const auto& b : bands_) {
    total += (b.end - b.begin) * (1.0 + spec.neg_ratio) * tail_above(spec, b.eps);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Sampling

JumpSet sample_jumps(const LevyMeasureSpec& spec, double eps, RngStream& rng) {
  if (!(eps > 0.0)) throw DomainError("jump threshold must be positive");
  return sample_jumps(spec, std::make_shared<const ThresholdProfile>(ThresholdProfile::uniform(eps)), rng);
}

JumpSet sample_jumps(const LevyMeasureSpec& spec, std::shared_ptr<const ThresholdProfile> profile,
                     RngStream& rng) {
  require_simulable(spec);
  const auto bands = profile->bands();
  std::vector<Draft> drafts;
  for (std::size_t k = 0; k < bands.size(); ++k) {
    const auto& band = bands[k];
    const double len = band.end - band.begin;
    const double tail = tail_above(spec, band.eps);
    if (tail == 0.0) continue;
    const std::uint64_t n_pos = rng.poisson(len * tail);
    const std::uint64_t n_neg = rng.poisson(len * spec.neg_ratio * tail);
    for (std::uint64_t j = 0; j < n_pos + n_neg; ++j) {
      const double time = band.begin + rng.uniform() * len;
      const double size = draw_size(spec, tail, 0.0, rng);
      drafts.push_back({time, j < n_pos ? size : -size, k});
    }
  }

  auto by_time = [](const Draft& l, const Draft& r) { return l.time < r.time; };
  std::sort(drafts.begin(), drafts.end(), by_time);
  JumpSet out;
  out.profile = std::move(profile);
  for (bool clash = true; clash;) {
    clash = false;
    for (std::size_t i = 1; i < drafts.size(); ++i) {
      if (drafts[i].time == drafts[i - 1].time) {
        const auto& band = bands[drafts[i].band];
        drafts[i].time = band.begin + rng.uniform() * (band.end - band.begin);
        ++out.collisions;
        clash = true;
      }
    }
    if (clash) std::sort(drafts.begin(), drafts.end(), by_time);
  }
  out.events.reserve(drafts.size());
  for (const auto& d : drafts) out.events.push_back({d.time, d.size});
  return out;
}

std::vector<JumpEvent> sample_size_band(const LevyMeasureSpec& spec, Sign sign, double lo, double hi,
                                        double horizon, RngStream& rng) {
  if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("size band needs 0 < lo < hi");
  require_simulable(spec);
  const double ratio = sign == Sign::Plus ? 1.0 : spec.neg_ratio;
  const double tail_lo = tail_above(spec, lo);
  const double tail_hi = tail_above(spec, hi);
  const std::uint64_t n = rng.poisson(horizon * ratio * (tail_lo - tail_hi));
  std::vector<JumpEvent> events;
  events.reserve(n);
  for (std::uint64_t j = 0; j < n; ++j) {
    const double time = rng.uniform() * horizon;
    const double size = std::min(draw_size(spec, tail_lo, tail_hi, rng), hi);
    events.push_back({time, sign == Sign::Plus ? size : -size});
  }
  std::sort(events.begin(), events.end(), [](const auto& l, const auto& r) { return l.time < r.time; });
  return events;
}

// ---------------------------------------------------------------------------
// Threshold policies

double budget_threshold(const LevyMeasureSpec& spec, double var_scale, double sd_target, double cap) {
  if (!(sd_target > 0.0)) throw ConfigError("error budget must be positive");
  if (!(cap > 0.0)) throw ConfigError("threshold cap must be positive");
  if (std::isinf(sd_target) || !(var_scale > 0.0)) return cap;
  const double target = sd_target * sd_target / var_scale;
  if (trunc_second_moment(spec, cap) <= target) return cap;
  double hi = cap;
  double lo = cap;
  while (trunc_second_moment(spec, lo) > target) {
    hi = lo;
    lo *= 1e-4;
    if (lo < 1e-300) throw ConfigError("no jump threshold meets the error budget");
  }
  double log_lo = std::log(lo);
  double log_hi = std::log(hi);
  while (log_hi - log_lo > 1e-14 * std::max(1.0, std::abs(log_lo))) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (mid <= log_lo || mid >= log_hi) break;
    if (trunc_second_moment(spec, std::exp(mid)) <= target) {
      log_lo = mid;
    } else {
      log_hi = mid;
    }
  }
  return std::exp(log_lo);
}

double min_relevant_threshold(const NormingScale& scale, double t_min, double x_min, double delta) {
  if (!(delta > 0.0)) throw ConfigError("error budget delta must be positive");
  if (!(x_min > 0.0) || !(t_min > 0.0)) throw ConfigError("threshold policy needs t_min, x_min > 0");
  const double a_min = scale.a(t_min);
  const double cap = std::min(a_min * x_min / 4.0, 1.0);
  return budget_threshold(scale.spec(), 1.0, delta * a_min, cap);
}

ThresholdProfile banded_threshold(const NormingScale& scale, double t_min, double x_min, double delta,
                                  double band_q, double max_expected_count) {
  if (!(delta > 0.0)) throw ConfigError("error budget delta must be positive");
  if (!(x_min > 0.0) || !(t_min > 0.0 && t_min <= 1.0)) {
    throw ConfigError("threshold policy needs t_min in (0,1] and x_min > 0");
  }
  if (!(band_q > 0.0 && band_q < 1.0)) throw ConfigError("band ratio must lie in (0,1)");
  const auto& spec = scale.spec();

  // Band edges s_0 = 1 > s_1 > ... > s_K, with s_K <= t_min.
  std::vector<double> edges{1.0};
  while (edges.back() > t_min) edges.push_back(std::pow(band_q, static_cast<double>(edges.size())));
  const std::size_t K = edges.size() - 1;
  std::vector<double> a_edge(edges.size());
  for (std::size_t n = 0; n <= K; ++n) a_edge[n] = scale.a(edges[n]);

  // eps of band (s_{n+1}, s_n] for n < K, and of (0, s_K] for n = K.
  auto eps_of = [&](double kappa, std::size_t n) {
    return std::min(kappa * a_edge[std::min(n + 1, K)], kMaxEps);
  };
  auto feasible = [&](double kappa) {
    const double both = 1.0 + spec.neg_ratio;
    double var = both * edges[K] * trunc_second_moment(spec, eps_of(kappa, K));
    if (std::sqrt(var) > delta * a_edge[K]) return false;
    for (std::size_t n = K; n-- > 0;) {
      var += both * (edges[n] - edges[n + 1]) * trunc_second_moment(spec, eps_of(kappa, n));
      if (std::sqrt(var) > delta * a_edge[n]) return false;
    }
    return true;
  };

  double kappa = x_min / 4.0;
  if (!std::isinf(delta) && !feasible(kappa)) {
    double lo = kappa;
    double hi = kappa;
    int steps = 0;
    while (!feasible(lo)) {
      hi = lo;
      lo *= 0.1;
      if (++steps > 40) throw ConfigError("no banded jump threshold meets the error budget");
    }
    double log_lo = std::log(lo);
    double log_hi = std::log(hi);
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (log_lo + log_hi);
      if (feasible(std::exp(mid))) {
        log_lo = mid;
      } else {
        log_hi = mid;
      }
    }
    kappa = std::exp(log_lo);
  }

  std::vector<ThresholdBand> bands;
  bands.push_back({0.0, edges[K], eps_of(kappa, K)});
  for (std::size_t n = K; n-- > 0;) bands.push_back({edges[n + 1], edges[n], eps_of(kappa, n)});
  auto profile = ThresholdProfile::banded(std::move(bands));
  const double expected = profile.expected_count(spec);
  if (expected > max_expected_count) {
    throw ConfigError("jump threshold needs " + format_double(expected) +
                      " expected jumps per replicate; relax the error budget or raise t_min");
  }
  return profile;
}

void write_jumps_csv(std::ostream& os, const JumpSet& jumps) {
  os << "time,size\n";
  for (const auto& e : jumps.events) os << format_double(e.time) << ',' << format_double(e.size) << '\n';
}

}  // namespace levy
