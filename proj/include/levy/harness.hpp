#pragma once

// Monte Carlo experiments: maximum-jump law, scaled suprema, the Y = Z
// coupling, and the exponential bounds for truncated processes.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levy/levy_model.hpp"
#include "levy/path_engine.hpp"
#include "levy/sampler.hpp"

namespace levy {

/// Two-sided Kolmogorov-Smirnov distance between the empirical CDF of the
/// sample and `cdf`. Throws std::invalid_argument on an empty sample.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Standard error used for KS trend comparisons.
inline double ks_std_error(std::size_t n) { return 0.5 / std::sqrt(static_cast<double>(n)); }

enum class ExperimentKind { Mt, Yz, De, Ineq, NegPart };
enum class EpsMode { Uniform, Banded };

std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
  LevyMeasureSpec spec;
  ExperimentKind kind = ExperimentKind::Mt;
  std::vector<double> report_times{1e-2, 1e-4};
  double q = 0.9;
  std::size_t replicates = 1000;
  std::uint64_t seed = 0;
  int threads = 0;
  bool serial = false;  // run the serial reference loop instead of OpenMP

  // Truncation policy.
  std::optional<double> eps;  // explicit uniform threshold
  double eps_budget = std::numeric_limits<double>::infinity();
  EpsMode eps_mode = EpsMode::Banded;
  double band_q = 0.9;
  /// Normalized levels below the Frechet quantile of this probability may be
  /// affected by truncation; everything above is simulated exactly.
  double floor_prob = 1e-6;
  double max_expected_jumps = 1e8;

  // Pointwise CDF levels for the maximum-jump experiment: normalized
  // multiples z of (-log t)^{1/alpha}, or exact-law quantile levels.
  std::vector<double> x_grid{0.5, 1.0, 2.0};
  std::vector<double> quantile_levels;

  bool centered = false;
  int interior_points = 8;

  // Inequality validation.
  std::vector<double> a_grid{0.05, 0.1, 0.2};
  std::vector<double> b_grid{0.1, 0.2, 0.4};
  std::vector<int> p_list{1, 2, 5};

  // Negative-part diagnostic.
  double eps_frac = 0.5;
  std::vector<double> neg_x{10, 20, 50};

  void validate() const;
};

struct StatRow {
  double t;
  std::string statistic;
  double level;
  double estimate;
  double std_error;
  double reference;
  double z_score;
  std::string flag;
};

struct IneqRow {
  double a;
  double b;
  double t;
  int p;  // 0 for the Gaussian-type bound
  std::string sign;
  std::string inequality;
  double estimate;
  double std_error;
  double bound;
  bool vacuous;
  bool degenerate;
  bool violated;
};

struct NegPartRow {
  double t;
  double x;
  double estimate;
  double std_error;
  double bound;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::Mt;
  std::string spec;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<double> report_times;
  double eps_min = 0.0;
  double expected_jumps = 0.0;
  std::size_t collisions = 0;
  std::vector<StatRow> rows;
  std::vector<IneqRow> ineq;
  std::vector<NegPartRow> negpart;
  std::vector<std::string> failures;  // hard checks
  std::vector<std::string> notes;     // trend flags and other soft findings
  double wall_seconds = 0.0;          // not part of the serialized outputs

  bool passed() const { return failures.empty(); }
  /// First row for (t, statistic); `level` is matched too unless NaN.
  const StatRow* find(double t, std::string_view statistic,
                      double level = std::numeric_limits<double>::quiet_NaN()) const;
};

/// Everything needed to simulate one replicate of a path experiment.
/// Immutable once built and shared by all workers.
class ReplicateContext {
 public:
  explicit ReplicateContext(const ExperimentConfig& cfg);
  ReplicateContext(const ReplicateContext&) = delete;
  ReplicateContext& operator=(const ReplicateContext&) = delete;

  const NormingScale& scale() const { return *scale_; }
  const PathModel& model() const { return *model_; }
  const TimeGrid& grid() const { return grid_; }
  const ThresholdProfile& profile() const { return *profile_; }
  double x_min() const { return x_min_; }

  JumpSet jumps(std::size_t replicate) const;
  /// Y, Z, M at the report times (decreasing t).
  std::vector<Extremes> extremes(const JumpSet& jumps) const;
  /// M at the report times only, without rebuilding the path.
  std::vector<double> max_jumps(const JumpSet& jumps) const;

 private:
  ExperimentConfig cfg_;
  std::unique_ptr<NormingScale> scale_;
  std::unique_ptr<CenteringFunction> centering_;
  std::shared_ptr<const ThresholdProfile> profile_;
  std::unique_ptr<PathModel> model_;
  TimeGrid grid_;
  double x_min_ = 0.0;
};

ExperimentReport run_mt_experiment(const ExperimentConfig& cfg);
ExperimentReport run_yz_experiment(const ExperimentConfig& cfg);
ExperimentReport run_de_experiment(const ExperimentConfig& cfg);
ExperimentReport run_inequality_validation(const ExperimentConfig& cfg);
ExperimentReport run_negative_part_diagnostic(const ExperimentConfig& cfg);
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace levy
