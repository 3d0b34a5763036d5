#pragma once

#include "pacabs/imdp.hpp"
#include "pacabs/planner.hpp"

#include <string>
#include <vector>

namespace pacabs {

/// Column headers, in emission order.
inline constexpr const char* kRunReportHeader =
    "iteration,N,states,choices,transitions,lower,upper,t_sample,t_intervals,t_solve,verdict,seed,beta,alpha,"
    "empirical_rate,empirical_se";
inline constexpr const char* kValuesHeader = "state,label,value";

/// One row per planning iteration; a report without iterations yields the header only.
void write_run_report(const RunReport& report, const std::string& path);
/// One row per iMDP state.
void write_values(const Imdp& m, const ValueVector& values, const std::string& path);
/// Header "k,action,x0,...,x{n-1}"; the action column is empty on the last row.
void write_trajectory(const ControlResult& run, const std::string& path);

/// Writes run_report.csv, values_k0.csv (when a model is present) and
/// trajectory_<i>.csv into `out_dir`, creating it if needed.
void emit_results(const PlanResult& plan, const std::vector<ControlResult>& runs, const std::string& out_dir);

}  // namespace pacabs
