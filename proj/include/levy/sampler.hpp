#pragma once

// Simulation of the jump measure above a (possibly time-dependent) threshold.

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "levy/levy_model.hpp"
#include "levy/rng.hpp"

namespace levy {

struct JumpEvent {
  double time;
  double size;  // positive or negative
};

/// Jumps with |y| > eps are simulated on the time interval (begin, end].
struct ThresholdBand {
  double begin;
  double end;
  double eps;
};

/// Piecewise-constant truncation level on (0, 1]. Bands are stored in
/// increasing time order and tile (0, 1] without gaps.
class ThresholdProfile {
 public:
  static ThresholdProfile uniform(double eps);
  /// Bands in any order; they must tile (0, 1].
  static ThresholdProfile banded(std::vector<ThresholdBand> bands);

  std::span<const ThresholdBand> bands() const { return bands_; }
  bool is_uniform() const { return bands_.size() == 1; }
  double eps_at(double time) const;
  double min_eps() const;
  /// Expected number of simulated jumps, both signs.
  double expected_count(const LevyMeasureSpec& spec) const;

 private:
  std::vector<ThresholdBand> bands_;
};

struct JumpSet {
  std::shared_ptr<const ThresholdProfile> profile;
  std::vector<JumpEvent> events;  // sorted by time, times distinct
  std::size_t collisions = 0;     // resampled time ties

  double threshold() const { return profile->min_eps(); }
};

/// Poisson random measure restricted to {|y| > eps}, on (0, 1].
JumpSet sample_jumps(const LevyMeasureSpec& spec, double eps, RngStream& rng);
JumpSet sample_jumps(const LevyMeasureSpec& spec, std::shared_ptr<const ThresholdProfile> profile,
                     RngStream& rng);

/// Jumps of one sign with |y| in (lo, hi] on (0, horizon], time sorted.
/// Used for the truncated compensated processes.
std::vector<JumpEvent> sample_size_band(const LevyMeasureSpec& spec, Sign sign, double lo, double hi,
                                        double horizon, RngStream& rng);

/// Largest eps <= cap with sqrt(var_scale B(eps)) <= sd_target; cap when
/// sd_target is infinite. Throws ConfigError if sd_target <= 0.
double budget_threshold(const LevyMeasureSpec& spec, double var_scale, double sd_target, double cap);

/// Largest eps with sqrt(B(eps)) <= delta a(t_min) and eps <= a(t_min) x_min / 4.
/// delta may be +infinity (only the second constraint). Throws ConfigError if delta <= 0.
double min_relevant_threshold(const NormingScale& scale, double t_min, double x_min, double delta);

/// Time-banded truncation eps(s) = kappa a(s_lo) on bands (q^{n+1}, q^n] down
/// to t_min, then one band (0, q^K]. kappa is the largest value with
/// kappa <= x_min / 4 (maximum-jump statistics exact at levels >= x_min) and
/// sqrt(Var of neglected jumps up to s) <= delta a(s) at every band edge.
/// Throws ConfigError when no such kappa exists or the expected jump count
/// exceeds max_expected_count.
ThresholdProfile banded_threshold(const NormingScale& scale, double t_min, double x_min, double delta,
                                  double band_q = 0.9, double max_expected_count = 1e8);

void write_jumps_csv(std::ostream& os, const JumpSet& jumps);

}  // namespace levy
