#include "pacabs/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace pacabs {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

const char* label_name(StateLabel l) {
  switch (l) {
    case StateLabel::Goal: return "goal";
    case StateLabel::Critical: return "critical";
    case StateLabel::Absorbing: return "absorbing";
    case StateLabel::None: break;
  }
  return "none";
}

}  // namespace

void write_run_report(const RunReport& r, const std::string& path) {
  auto out = open_out(path);
  out << kRunReportHeader << '\n';
  for (std::size_t i = 0; i < r.iterations.size(); ++i) {
    const auto& it = r.iterations[i];
    const bool last = i + 1 == r.iterations.size();
    out << i << ',' << it.N << ',' << it.states << ',' << it.choices << ',' << it.transitions << ',' << num(it.lower)
        << ',' << num(it.upper) << ',' << num(it.t_sample) << ',' << num(it.t_intervals) << ',' << num(it.t_solve)
        << ',' << (last ? verdict_name(r.verdict) : "continue") << ',' << r.seed << ',' << num(r.beta) << ','
        << num(r.confidence.alpha) << ',' << (last && r.empirical_rate ? num(*r.empirical_rate) : "") << ','
        << (last && r.empirical_se ? num(*r.empirical_se) : "") << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_values(const Imdp& m, const ValueVector& values, const std::string& path) {
  if (values.size() != m.num_states()) throw std::invalid_argument("value vector does not match the model");
  auto out = open_out(path);
  out << kValuesHeader << '\n';
  for (StateId s = 0; s < m.num_states(); ++s) out << s << ',' << label_name(m.label(s)) << ',' << num(values[s]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_trajectory(const ControlResult& run, const std::string& path) {
  auto out = open_out(path);
  const Eigen::Index n = run.trajectory.empty() ? 0 : run.trajectory.front().size();
  out << "k,action";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i;
  out << '\n';
  for (std::size_t k = 0; k < run.trajectory.size(); ++k) {
    out << k << ',';
    if (k < run.actions.size()) out << run.actions[k];
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << num(run.trajectory[k](i));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void emit_results(const PlanResult& plan, const std::vector<ControlResult>& runs, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_run_report(plan.report, (dir / "run_report.csv").string());
  if (plan.imdp && !plan.lower.values.empty()) write_values(*plan.imdp, plan.lower.values, (dir / "values_k0.csv").string());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    write_trajectory(runs[i], (dir / ("trajectory_" + std::to_string(i) + ".csv")).string());
  }
}

}  // namespace pacabs
