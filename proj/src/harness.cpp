#include "levy/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "levy/errors.hpp"
#include "levy/exact_dist.hpp"
#include "levy/format.hpp"
#include "levy/parallel.hpp"

namespace levy {

namespace {

void check_jump_count(double expected, double cap) {
  if (expected > cap) {
    throw ConfigError("jump threshold needs " + format_double(expected) +
                      " expected jumps per replicate; relax the error budget or raise t_min");
  }
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double norm_factor(double t, double alpha) { return std::pow(-std::log(t), 1.0 / alpha); }

template <class F>
auto map_replicates(const ExperimentConfig& cfg, F&& f) {
  return cfg.serial ? serial_map(cfg.replicates, f) : parallel_map(cfg.replicates, cfg.threads, f);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double binomial_se(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

double fraction(std::size_t count, std::size_t n) { return static_cast<double>(count) / static_cast<double>(n); }

ExperimentReport report_header(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.kind = cfg.kind;
  r.spec = cfg.spec.describe();
  r.replicates = cfg.replicates;
  r.seed = cfg.seed;
  r.report_times = cfg.report_times;
  std::sort(r.report_times.begin(), r.report_times.end(), std::greater<>());
  r.report_times.erase(std::unique(r.report_times.begin(), r.report_times.end()), r.report_times.end());
  return r;
}

StatRow ks_row(double t, std::string statistic, std::vector<double> sample, double alpha) {
  const double d = ks_statistic(sample, [alpha](double v) { return frechet_cdf(v, alpha); });
  return {t, std::move(statistic), kNaN, d, ks_std_error(sample.size()), kNaN, kNaN, ""};
}

StatRow probability_row(double t, std::string statistic, std::size_t hits, std::size_t n, double reference) {
  const double p = fraction(hits, n);
  double z = kNaN;
  if (reference > 0.0 && reference < 1.0) z = (p - reference) / binomial_se(reference, n);
  return {t, std::move(statistic), kNaN, p, binomial_se(p, n), reference, z, ""};
}

// Marks departures from the expected monotone direction along decreasing t.
// Rows of `statistic` are visited in report order (decreasing t).
void flag_trend(ExperimentReport& r, const std::string& statistic, bool expect_decrease) {
  StatRow* prev = nullptr;
  for (auto& row : r.rows) {
    if (row.statistic != statistic) continue;
    if (prev != nullptr) {
      const double wrong = expect_decrease ? row.estimate - prev->estimate : prev->estimate - row.estimate;
      if (wrong > 0.0) {
        const double tol = 2.0 * std::max(row.std_error, prev->std_error);
        row.flag = wrong <= tol ? "within_noise" : "trend_break";
        r.notes.push_back(statistic + " at t=" + format_double(row.t) + ": " + row.flag + " (" +
                          format_double(prev->estimate) + " -> " + format_double(row.estimate) + ")");
      }
    }
    prev = &row;
  }
}

std::vector<double> column(const std::vector<std::vector<double>>& reps, std::size_t k, double scale = 1.0) {
  std::vector<double> out;
  out.reserve(reps.size());
  for (const auto& r : reps) out.push_back(r[k] * scale);
  return out;
}

}  // namespace

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("KS statistic of an empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Mt: return "mt";
    case ExperimentKind::Yz: return "yz";
    case ExperimentKind::De: return "de";
    case ExperimentKind::Ineq: return "ineq";
    case ExperimentKind::NegPart: return "negpart";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (replicates < 100) throw ConfigError("at least 100 replicates are required");
  if (report_times.empty()) throw ConfigError("at least one report time is required");
  for (double t : report_times) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("report times must lie in (0,1)");
  }
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("grid ratio q must lie in (0,1)");
  if (!(eps_budget > 0.0)) throw ConfigError("error budget must be positive");
  if (eps && !(*eps > 0.0)) throw ConfigError("explicit threshold must be positive");
  if (!(floor_prob > 0.0 && floor_prob < 1.0)) throw ConfigError("floor probability must lie in (0,1)");
  for (double z : x_grid) {
    if (!(z > 0.0)) throw ConfigError("x-grid levels must be positive");
  }
  for (double p : quantile_levels) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("quantile levels must lie in (0,1)");
  }
  if (kind == ExperimentKind::Ineq) {
    if (a_grid.empty() || b_grid.empty() || p_list.empty()) throw ConfigError("inequality grids must be nonempty");
    for (double a : a_grid) {
      if (!(a > 0.0 && a <= 1.0)) throw ConfigError("truncation levels a must lie in (0,1]");
    }
    for (double b : b_grid) {
      if (!(b > 0.0)) throw ConfigError("levels b must be positive");
    }
    for (int p : p_list) {
      if (p < 1) throw ConfigError("p must be an integer >= 1");
    }
  }
  if (kind == ExperimentKind::NegPart) {
    if (!(eps_frac > 0.0 && eps_frac < 1.0)) throw ConfigError("eps fraction must lie in (0,1)");
    if (neg_x.empty()) throw ConfigError("x list must be nonempty");
    for (double x : neg_x) {
      if (!(x > 0.0)) throw ConfigError("x values must be positive");
    }
  }
}

const StatRow* ExperimentReport::find(double t, std::string_view statistic, double level) const {
  for (const auto& row : rows) {
    if (row.t == t && row.statistic == statistic && (std::isnan(level) || row.level == level)) return &row;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// ReplicateContext

ReplicateContext::ReplicateContext(const ExperimentConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  scale_ = std::make_unique<NormingScale>(cfg_.spec);
  grid_ = TimeGrid::make(cfg_.q, cfg_.report_times);
  const double alpha = cfg_.spec.alpha;
  const double t_max = grid_.report_times.front();
  const double t_min = grid_.t_min();

  // Lowest level that any statistic resolves; jumps below x_min a(s) cannot matter.
  const double z_floor = std::pow(-std::log(cfg_.floor_prob), -1.0 / alpha);
  x_min_ = z_floor * norm_factor(t_max, alpha);
  if (cfg_.kind == ExperimentKind::Mt) {
    if (!cfg_.quantile_levels.empty()) {
      const double p_lo = *std::min_element(cfg_.quantile_levels.begin(), cfg_.quantile_levels.end());
      for (double t : grid_.report_times) x_min_ = std::min(x_min_, mt_quantile(*scale_, t, p_lo));
    } else {
      const double z_lo = *std::min_element(cfg_.x_grid.begin(), cfg_.x_grid.end());
      x_min_ = std::min(x_min_, z_lo * norm_factor(t_max, alpha));
    }
  }

  ThresholdProfile profile = [&] {
    if (cfg_.eps) return ThresholdProfile::uniform(*cfg_.eps);
    if (cfg_.eps_mode == EpsMode::Uniform) {
      return ThresholdProfile::uniform(min_relevant_threshold(*scale_, t_min, x_min_, cfg_.eps_budget));
    }
    return banded_threshold(*scale_, t_min, x_min_, cfg_.eps_budget, cfg_.band_q, cfg_.max_expected_jumps);
  }();
  check_jump_count(profile.expected_count(cfg_.spec), cfg_.max_expected_jumps);
  profile_ = std::make_shared<const ThresholdProfile>(std::move(profile));
  if (cfg_.centered) centering_ = std::make_unique<CenteringFunction>(*scale_, grid_.points.back());
  model_ = std::make_unique<PathModel>(*scale_, profile_, centering_.get(), cfg_.interior_points);
}

JumpSet ReplicateContext::jumps(std::size_t replicate) const {
  RngStream rng(cfg_.seed, replicate);
  return sample_jumps(cfg_.spec, profile_, rng);
}

std::vector<Extremes> ReplicateContext::extremes(const JumpSet& jumps) const {
  const PathFunctionals pf = build_path(jumps, *model_, grid_);
  return scaled_extremes(pf, *model_, grid_.report_times);
}

std::vector<double> ReplicateContext::max_jumps(const JumpSet& jumps) const {
  return max_jump_extremes(jumps, *scale_, grid_.report_times);
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

struct PathReplicate {
  std::vector<Extremes> ext;
  std::size_t collisions = 0;
};

struct PathRun {
  ExperimentReport report;
  std::vector<PathReplicate> reps;
};

PathRun simulate_paths(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  PathRun run{report_header(cfg), {}};
  const ReplicateContext ctx(cfg);
  run.report.eps_min = ctx.profile().min_eps();
  run.report.expected_jumps = ctx.profile().expected_count(cfg.spec);
  run.reps = map_replicates(cfg, [&](std::size_t i) {
    const JumpSet js = ctx.jumps(i);
    return PathReplicate{ctx.extremes(js), js.collisions};
  });
  for (const auto& r : run.reps) run.report.collisions += r.collisions;
  run.report.wall_seconds = seconds_since(start);
  return run;
}

}  // namespace

ExperimentReport run_mt_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report = report_header(cfg);
  const ReplicateContext ctx(cfg);
  report.eps_min = ctx.profile().min_eps();
  report.expected_jumps = ctx.profile().expected_count(cfg.spec);

  struct Rep {
    std::vector<double> m;
    std::size_t collisions = 0;
  };
  const auto reps = map_replicates(cfg, [&](std::size_t i) {
    const JumpSet js = ctx.jumps(i);
    return Rep{ctx.max_jumps(js), js.collisions};
  });
  for (const auto& r : reps) report.collisions += r.collisions;

  const std::size_t n = cfg.replicates;
  const double alpha = cfg.spec.alpha;
  std::size_t tests = 0;
  std::size_t exceed = 0;
  for (std::size_t k = 0; k < report.report_times.size(); ++k) {
    const double t = report.report_times[k];
    std::vector<double> sample;
    sample.reserve(n);
    for (const auto& r : reps) sample.push_back(r.m[k]);

    std::vector<double> levels;
    if (!cfg.quantile_levels.empty()) {
      for (double p : cfg.quantile_levels) levels.push_back(mt_quantile(ctx.scale(), t, p));
    } else {
      for (double z : cfg.x_grid) levels.push_back(z * norm_factor(t, alpha));
    }
    for (double x : levels) {
      const std::size_t hits =
          static_cast<std::size_t>(std::count_if(sample.begin(), sample.end(), [x](double v) { return v <= x; }));
      StatRow row = probability_row(t, "cdf", hits, n, mt_cdf_exact(ctx.scale(), t, x));
      row.level = x;
      ++tests;
      if (std::abs(row.z_score) > 3.0) {
        row.flag = "z>3";
        ++exceed;
      }
      report.rows.push_back(std::move(row));
    }
    const double norm = norm_factor(t, alpha);
    for (double& v : sample) v /= norm;
    report.rows.push_back(ks_row(t, "ks_frechet_m", std::move(sample), alpha));
  }
  flag_trend(report, "ks_frechet_m", true);
  const double allowed = std::max(1.0, 0.01 * static_cast<double>(tests));
  if (static_cast<double>(exceed) > allowed) {
    report.failures.push_back(std::to_string(exceed) + " of " + std::to_string(tests) +
                              " pointwise CDF checks have |z| > 3");
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_yz_experiment(const ExperimentConfig& cfg) {
  PathRun run = simulate_paths(cfg);
  ExperimentReport& report = run.report;
  const std::size_t n = cfg.replicates;
  const double alpha = cfg.spec.alpha;
  std::size_t below = 0;
  for (std::size_t k = 0; k < report.report_times.size(); ++k) {
    const double t = report.report_times[k];
    const double inv = 1.0 / norm_factor(t, alpha);
    std::vector<double> y, z, m;
    std::size_t ge = 0;
    std::size_t eq = 0;
    for (const auto& r : run.reps) {
      const auto& e = r.ext[k];
      y.push_back(e.y * inv);
      z.push_back(e.z * inv);
      m.push_back(e.m * inv);
      ge += e.y >= e.z;
      eq += e.y == e.z;
    }
    below += n - ge;
    report.rows.push_back(ks_row(t, "ks_frechet_y", std::move(y), alpha));
    report.rows.push_back(ks_row(t, "ks_frechet_z", std::move(z), alpha));
    report.rows.push_back(ks_row(t, "ks_frechet_m", std::move(m), alpha));
    report.rows.push_back(probability_row(t, "frac_y_ge_z", ge, n, 1.0));
    report.rows.push_back(probability_row(t, "p_y_eq_z", eq, n, kNaN));
  }
  flag_trend(report, "ks_frechet_y", true);
  flag_trend(report, "ks_frechet_z", true);
  flag_trend(report, "ks_frechet_m", true);
  if (below > 0) report.failures.push_back(std::to_string(below) + " replicate values with Y < Z");
  return report;
}

ExperimentReport run_de_experiment(const ExperimentConfig& cfg) {
  PathRun run = simulate_paths(cfg);
  ExperimentReport& report = run.report;
  const std::size_t n = cfg.replicates;
  std::size_t below = 0;
  for (std::size_t k = 0; k < report.report_times.size(); ++k) {
    const double t = report.report_times[k];
    std::size_t ge = 0;
    std::size_t eq = 0;
    for (const auto& r : run.reps) {
      ge += r.ext[k].y >= r.ext[k].z;
      eq += r.ext[k].y == r.ext[k].z;
    }
    below += n - ge;
    report.rows.push_back(probability_row(t, "p_y_eq_z", eq, n, kNaN));
    report.rows.push_back(probability_row(t, "frac_y_ge_z", ge, n, 1.0));
  }
  flag_trend(report, "p_y_eq_z", false);
  if (below > 0) report.failures.push_back(std::to_string(below) + " replicate values with Y < Z");
  return report;
}

ExperimentReport run_inequality_validation(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report = report_header(cfg);
  const auto& spec = cfg.spec;
  const auto& times = report.report_times;
  const double t_max = times.front();
  const double b_min = *std::min_element(cfg.b_grid.begin(), cfg.b_grid.end());
  const std::size_t A = cfg.a_grid.size();
  const std::size_t T = times.size();

  // Per truncation level: threshold and the drifts of X^(a) and X^(-a).
  struct Level {
    double a;
    double eps;
    double drift_pos;
    double drift_neg;
  };
  std::vector<Level> levels;
  report.eps_min = std::numeric_limits<double>::infinity();
  for (double a : cfg.a_grid) {
    const double var_scale = t_max * std::max(1.0, spec.neg_ratio);
    const double eps = cfg.eps ? *cfg.eps : budget_threshold(spec, var_scale, cfg.eps_budget * b_min, a / 2.0);
    if (!(eps < a)) throw ConfigError("truncation level a=" + format_double(a) + " is not above the threshold");
    const double band_mean = upper_first_moment(spec, eps) - upper_first_moment(spec, a);
    levels.push_back({a, eps, -band_mean, spec.neg_ratio * band_mean});
    report.eps_min = std::min(report.eps_min, eps);
    report.expected_jumps += t_max * (1.0 + spec.neg_ratio) * (tail_above(spec, eps) - tail_above(spec, a));
  }
  // The band process is itself a Levy process whose B is at most B(a), so the
  // bounds stay valid for any threshold; the budget only trades cost for realism.
  check_jump_count(report.expected_jumps, cfg.max_expected_jumps);

  // Per replicate: [a][t][sup X^(a), sup -X^(a), sup X^(-a), sup -X^(-a)].
  const auto reps = map_replicates(cfg, [&](std::size_t i) {
    std::vector<double> out(A * T * 4);
    for (std::size_t ai = 0; ai < A; ++ai) {
      const auto& lv = levels[ai];
      RngStream rng_pos(cfg.seed, i, static_cast<std::uint32_t>(1 + 2 * ai));
      RngStream rng_neg(cfg.seed, i, static_cast<std::uint32_t>(2 + 2 * ai));
      const auto pos = sample_size_band(spec, Sign::Plus, lv.eps, lv.a, t_max, rng_pos);
      const auto neg = sample_size_band(spec, Sign::Minus, lv.eps, lv.a, t_max, rng_neg);
      const auto sp = compensated_sups(pos, lv.drift_pos, times);
      const auto sn = compensated_sups(neg, lv.drift_neg, times);
      for (std::size_t k = 0; k < T; ++k) {
        double* cell = &out[(ai * T + k) * 4];
        cell[0] = sp[k].up;
        cell[1] = sp[k].down;
        cell[2] = sn[k].up;
        cell[3] = sn[k].down;
      }
    }
    return out;
  });

  const std::size_t n = cfg.replicates;
  std::size_t violations = 0;
  for (std::size_t ai = 0; ai < A; ++ai) {
    const double a = levels[ai].a;
    for (double b : cfg.b_grid) {
      for (std::size_t k = 0; k < T; ++k) {
        const double t = times[k];
        auto estimate = [&](int slot) {
          std::size_t hits = 0;
          for (const auto& r : reps) hits += r[(ai * T + k) * 4 + static_cast<std::size_t>(slot)] > b;
          return fraction(hits, n);
        };
        auto add = [&](int p, Sign sign, const char* inequality, double p_hat, const BoundValue& bound) {
          const double se = binomial_se(p_hat, n);
          const bool violated = !bound.vacuous && p_hat - 3.0 * se > bound.value;
          violations += violated;
          report.ineq.push_back({a, b, t, p, sign == Sign::Plus ? "+" : "-", inequality, p_hat, se, bound.value,
                                 bound.vacuous, bound.degenerate, violated});
        };
        const double up_pos = estimate(0);
        const double down_pos = estimate(1);
        const double up_neg = estimate(2);
        const double down_neg = estimate(3);
        for (int p : cfg.p_list) {
          add(p, Sign::Plus, "eq1", up_pos, prop1_bound_eq1(spec, a, b, t, p, Sign::Plus));
          add(p, Sign::Minus, "eq1", down_neg, prop1_bound_eq1(spec, a, b, t, p, Sign::Minus));
        }
        add(0, Sign::Plus, "eq2", down_pos, prop1_bound_eq2(spec, a, b, t, Sign::Plus));
        add(0, Sign::Minus, "eq2", up_neg, prop1_bound_eq2(spec, a, b, t, Sign::Minus));
      }
    }
  }
  if (violations > 0) {
    report.failures.push_back(std::to_string(violations) + " bound checks violated beyond 3 standard errors");
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_negative_part_diagnostic(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report = report_header(cfg);
  const auto& spec = cfg.spec;
  const auto& times = report.report_times;
  const NormingScale scale(spec);
  const double t_max = times.front();
  const double x_lo = *std::min_element(cfg.neg_x.begin(), cfg.neg_x.end());

  // The spectrally negative part: jumps below -eps, compensated on [-1, -eps).
  // The omitted jumps must be small against the lowest level at every t.
  double eps = 0.5;
  if (cfg.eps) {
    eps = *cfg.eps;
  } else if (spec.neg_ratio > 0.0) {
    for (double t : times) {
      const double level = cfg.eps_frac / 4.0 * scale.a(t) * x_lo;
      eps = std::min(eps, budget_threshold(spec, t * spec.neg_ratio, cfg.eps_budget * level, 0.5));
    }
  }
  const GammaShifts gamma = gamma_shifts(spec);
  const double drift = spec.neg_ratio * (upper_first_moment(spec, eps) - gamma.plus);
  report.eps_min = eps;
  report.expected_jumps = t_max * spec.neg_ratio * tail_above(spec, eps);
  check_jump_count(report.expected_jumps, cfg.max_expected_jumps);

  const double inf = std::numeric_limits<double>::infinity();
  const auto reps = map_replicates(cfg, [&](std::size_t i) {
    std::vector<double> out(times.size(), 0.0);
    if (spec.neg_ratio == 0.0) return out;
    RngStream rng(cfg.seed, i, 1);
    const auto neg = sample_size_band(spec, Sign::Minus, eps, inf, t_max, rng);
    const auto sups = compensated_sups(neg, drift, times);
    for (std::size_t k = 0; k < times.size(); ++k) out[k] = sups[k].up;
    return out;
  });

  const std::size_t n = cfg.replicates;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const double a_t = scale.a(t);
    for (double x : cfg.neg_x) {
      const double level = cfg.eps_frac / 4.0 * a_t * x;
      const auto sample = column(reps, k);
      const auto hits = static_cast<std::size_t>(
          std::count_if(sample.begin(), sample.end(), [level](double v) { return v > level; }));
      const double p = fraction(hits, n);
      const double bound = std::exp(-x * cfg.eps_frac / 8.0);
      report.negpart.push_back({t, x, p, binomial_se(p, n), bound});
      if (p > bound) {
        report.notes.push_back("t=" + format_double(t) + " x=" + format_double(x) + ": estimate " +
                               format_double(p) + " above " + format_double(bound));
      }
    }
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::Mt: return run_mt_experiment(cfg);
    case ExperimentKind::Yz: return run_yz_experiment(cfg);
    case ExperimentKind::De: return run_de_experiment(cfg);
    case ExperimentKind::Ineq: return run_inequality_validation(cfg);
    case ExperimentKind::NegPart: return run_negative_part_diagnostic(cfg);
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace levy
