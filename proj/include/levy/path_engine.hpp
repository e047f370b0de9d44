#pragma once

// Paths of the Levy process rebuilt from a JumpSet, and the scaled extremes
//   Y_t = sup_{t<=s<=1} Xbar(s)/a(s),  Z_t = sup X(s)/a(s),  M_t = sup m(s)/a(s).
//
// Between nodes the path is linear (drift of the current threshold band), so
// suprema reduce to a finite evaluation set: node values, left limits, and on
// segments where s -> X(s)/a(s) need not decrease, interior sample points.

#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "levy/levy_model.hpp"
#include "levy/sampler.hpp"

namespace levy {

/// Geometric grid q^n, n = 0..n_max with q^{n_max} <= t_min, merged with the
/// report times. Both lists are strictly decreasing.
struct TimeGrid {
  double q = 0.9;
  int n_max = 0;
  std::vector<double> points;
  std::vector<double> report_times;

  static TimeGrid make(double q, std::span<const double> report_times);
  double t_min() const { return report_times.back(); }
};

/// Drift and centering used to rebuild paths. The drift on a band with
/// threshold eps is (1 - r) nu(eps): the compensators of the simulated jumps
/// in (eps, 1] on both sides, plus the shifts gamma_+ and gamma_- = -r gamma_+.
class PathModel {
 public:
  PathModel(const NormingScale& scale, std::shared_ptr<const ThresholdProfile> profile,
            const CenteringFunction* centering = nullptr, int interior_points = 8);

  const NormingScale& scale() const { return *scale_; }
  const ThresholdProfile& profile() const { return *profile_; }
  const CenteringFunction* centering() const { return centering_; }
  bool centered() const { return centering_ != nullptr; }
  int interior_points() const { return interior_; }
  /// Drift rate on the segment ending at time s (band containing s).
  double drift_at(double s) const;

 private:
  const NormingScale* scale_;
  std::shared_ptr<const ThresholdProfile> profile_;
  const CenteringFunction* centering_;
  int interior_;
  std::vector<double> drift_;  // per band, same order as profile bands
};

/// Drift rate (1 - r) nu(eps) for jumps truncated at eps.
double band_drift(const LevyMeasureSpec& spec, const GammaShifts& gamma, double eps);

struct PathNode {
  double s;
  double a;       // a(s)
  double jump;    // jump at s (0 at grid-only nodes)
  double drift;   // slope of the segment ending at s
  double x_left;  // X(s-)
  double x;       // X(s)
  double xbar;    // sup_{u<=s} X(u)
  double m;       // largest positive jump up to s
  // Centered path X - c; NaN unless the model is centered.
  double xc_left = std::numeric_limits<double>::quiet_NaN();
  double xc = std::numeric_limits<double>::quiet_NaN();
  double xcbar = std::numeric_limits<double>::quiet_NaN();
};

struct PathFunctionals {
  std::vector<PathNode> nodes;  // increasing in s, last node at s = 1
  bool centered = false;
};

struct Extremes {
  double t;
  double y;
  double z;
  double m;
};

/// Nodes: all jump times, grid points, report times, threshold band edges, 1.
PathFunctionals build_path(const JumpSet& jumps, const PathModel& model, const TimeGrid& grid);

/// Y, Z, M at each report time (in the given order) by one backward pass with
/// running suffix maxima; segments that cannot beat the current maximum skip
/// their interior evaluation. Report times must be nodes of the path.
std::vector<Extremes> scaled_extremes(const PathFunctionals& pf, const PathModel& model,
                                      std::span<const double> report_times);

namespace reference {
/// Same quantities, every report time scanned independently without pruning.
/// Bitwise identical to levy::scaled_extremes.
std::vector<Extremes> scaled_extremes(const PathFunctionals& pf, const PathModel& model,
                                      std::span<const double> report_times);
}  // namespace reference

/// M_t straight from the jumps: max over positive jumps (u, y) of y / a(max(u, t)).
std::vector<double> max_jump_extremes(const JumpSet& jumps, const NormingScale& scale,
                                      std::span<const double> report_times);

/// sup_{s<=h} X(s) and sup_{s<=h} (-X(s)) for X(s) = sum of jumps up to s + drift s.
struct TwoSidedSup {
  double up;
  double down;
};
std::vector<TwoSidedSup> compensated_sups(std::span<const JumpEvent> events, double drift,
                                          std::span<const double> horizons);

}  // namespace levy
