#include "levy/report_io.hpp"

#include <json.hpp>
#include <ostream>

#include "levy/format.hpp"

namespace levy {

namespace {

const char* flag01(bool b) { return b ? "1" : "0"; }

}  // namespace

void write_stats_csv(std::ostream& os, const ExperimentReport& report) {
  os << "t,statistic,level,estimate,std_error,reference,z_score,flag\n";
  for (const auto& r : report.rows) {
    os << format_double(r.t) << ',' << r.statistic << ',' << format_double(r.level) << ','
       << format_double(r.estimate) << ',' << format_double(r.std_error) << ',' << format_double(r.reference)
       << ',' << format_double(r.z_score) << ',' << r.flag << '\n';
  }
}

void write_ineq_csv(std::ostream& os, const ExperimentReport& report) {
  os << "a,b,t,p,sign,inequality,estimate,std_error,bound,vacuous,degenerate,violated\n";
  for (const auto& r : report.ineq) {
    os << format_double(r.a) << ',' << format_double(r.b) << ',' << format_double(r.t) << ','
       << (r.p > 0 ? std::to_string(r.p) : std::string{}) << ',' << r.sign << ',' << r.inequality << ','
       << format_double(r.estimate) << ',' << format_double(r.std_error) << ',' << format_double(r.bound) << ','
       << flag01(r.vacuous) << ',' << flag01(r.degenerate) << ',' << flag01(r.violated) << '\n';
  }
}

void write_negpart_csv(std::ostream& os, const ExperimentReport& report) {
  os << "t,x,estimate,std_error,bound\n";
  for (const auto& r : report.negpart) {
    os << format_double(r.t) << ',' << format_double(r.x) << ',' << format_double(r.estimate) << ','
       << format_double(r.std_error) << ',' << format_double(r.bound) << '\n';
  }
}

void write_ssv_csv(std::ostream& os, std::span<const double> t_grid, std::span<const double> deviation) {
  os << "t,sup_deviation\n";
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    os << format_double(t_grid[i]) << ',' << format_double(deviation[i]) << '\n';
  }
}

void write_paths_csv(std::ostream& os, std::span<const Extremes> extremes) {
  os << "t,Y,Z,M\n";
  for (const auto& e : extremes) {
    os << format_double(e.t) << ',' << format_double(e.y) << ',' << format_double(e.z) << ','
       << format_double(e.m) << '\n';
  }
}

std::string summary_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(report.kind);
  j["spec"] = report.spec;
  j["replicates"] = report.replicates;
  j["seed"] = report.seed;
  j["report_times"] = report.report_times;
  j["eps_min"] = report.eps_min;
  j["expected_jumps_per_replicate"] = report.expected_jumps;
  j["time_collisions"] = report.collisions;
  j["passed"] = report.passed();
  j["failures"] = report.failures;
  j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

}  // namespace levy
