#pragma once

// CSV and JSON serialization of experiment outputs. All numbers use the
// shortest round-trip decimal form, so equal reports give equal bytes.

#include <iosfwd>
#include <span>
#include <string>

#include "levy/harness.hpp"
#include "levy/path_engine.hpp"

namespace levy {

/// t,statistic,level,estimate,std_error,reference,z_score,flag
void write_stats_csv(std::ostream& os, const ExperimentReport& report);
/// a,b,t,p,sign,inequality,estimate,std_error,bound,vacuous,degenerate,violated
void write_ineq_csv(std::ostream& os, const ExperimentReport& report);
/// t,x,estimate,std_error,bound
void write_negpart_csv(std::ostream& os, const ExperimentReport& report);
/// t,sup_deviation
void write_ssv_csv(std::ostream& os, std::span<const double> t_grid, std::span<const double> deviation);
/// t,Y,Z,M for one replicate
void write_paths_csv(std::ostream& os, std::span<const Extremes> extremes);

/// Structured summary (no timing information).
std::string summary_json(const ExperimentReport& report);

}  // namespace levy
