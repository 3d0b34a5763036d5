#include "pacabs/config.hpp"
#include "pacabs/models.hpp"
#include "pacabs/planner.hpp"
#include "pacabs/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

using namespace pacabs;

namespace {

struct Overrides {
  std::string config;
  std::string model;
  std::optional<std::string> K;
  std::optional<double> eta;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::size_t> N0;
  std::optional<double> gamma;
  std::optional<std::size_t> Nmax;
  std::optional<bool> symmetric;
  std::optional<int> rho;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> noise_file;
  bool noise_grouped = false;
  std::string out = "out";
};

void add_spec_options(CLI::App* cmd, Overrides& o, bool model_positional) {
  if (model_positional) {
    cmd->add_option("model", o.model, "built-in model name")->required();
  } else {
    auto* c = cmd->add_option("-c,--config", o.config, "JSON problem file")->check(CLI::ExistingFile);
    auto* m = cmd->add_option("-m,--model", o.model, "built-in model name");
    c->excludes(m);
    m->excludes(c);
  }
  cmd->add_option("--K", o.K, "horizon in grouped steps, or inf");
  cmd->add_option("--eta", o.eta, "probability threshold");
  cmd->add_option("--alpha", o.alpha, "whole-model confidence");
  cmd->add_option("--beta", o.beta, "per-interval confidence");
  cmd->add_option("--N0", o.N0, "initial sample count");
  cmd->add_option("--gamma", o.gamma, "sample growth factor");
  cmd->add_option("--Nmax", o.Nmax, "largest sample count");
  cmd->add_option("--symmetric", o.symmetric, "use the symmetric interval count");
  cmd->add_option("--rho", o.rho, "aggregation bins (0 = off)");
  cmd->add_option("--seed", o.seed, "64-bit RNG seed");
  cmd->add_option("--noise-file", o.noise_file, "CSV of noise samples");
  cmd->add_flag("--noise-grouped", o.noise_grouped, "noise file holds grouped-system samples");
  cmd->add_option("-o,--out", o.out, "output directory");
}

ProblemSpec resolve(const Overrides& o) {
  if (o.config.empty() && o.model.empty()) throw std::invalid_argument("give --config or --model");
  ProblemSpec s = o.config.empty() ? builtin_model(o.model) : load_config(o.config);
  if (o.K) s.horizon = *o.K == "inf" ? Horizon::infinite() : Horizon::finite(std::stoi(*o.K));
  if (o.eta) s.eta = *o.eta;
  if (o.alpha) {
    s.alpha = *o.alpha;
    s.beta.reset();
  }
  if (o.beta) {
    s.beta = *o.beta;
    s.alpha.reset();
  }
  if (o.N0) s.N0 = *o.N0;
  if (o.gamma) s.gamma = *o.gamma;
  if (o.Nmax) s.Nmax = *o.Nmax;
  if (o.symmetric) s.symmetric = *o.symmetric;
  if (o.rho) s.rho = *o.rho;
  if (o.seed) s.seed = *o.seed;
  if (o.noise_file) s.noise = FileNoise{*o.noise_file, o.noise_grouped};
  s.validate();
  return s;
}

void print_iterations(const RunReport& r) {
  std::printf("%8s %8s %10s %12s %10s %10s %9s\n", "N", "states", "choices", "transitions", "lower", "upper", "time[s]");
  for (const auto& it : r.iterations) {
    std::printf("%8zu %8zu %10zu %12zu %10.6f %10.6f %9.3f\n", it.N, it.states, it.choices, it.transitions, it.lower,
                it.upper, it.t_sample + it.t_intervals + it.t_solve);
  }
  std::printf("verdict: %s (beta = %.6g, alpha = %.6g, seed = %llu)\n", verdict_name(r.verdict), r.beta, r.confidence.alpha,
              static_cast<unsigned long long>(r.seed));
}

int cmd_abstract(const Overrides& o) {
  const ProblemSpec s = resolve(o);
  const GroupedSystem gsys = group_steps(s.system, s.group);
  const auto graph = build_states_actions(s.partition, gsys, s.input_slack);
  std::printf("states: %zu\nactions: %zu\nchoices: %zu\n", graph.num_states(), graph.num_actions(), graph.num_choices());
  const auto conf = s.confidence();
  std::printf("beta: %.6g\nalpha: %.6g\nunique intervals: %.6g\n", conf.beta, conf.alpha, conf.unique_interval_count);
  return 0;
}

PlanResult plan_and_report(const ProblemSpec& s, NoiseSampler& sampler) {
  PlanResult plan = offline_plan(s, sampler);
  print_iterations(plan.report);
  return plan;
}

int cmd_synthesize(const Overrides& o) {
  const ProblemSpec s = resolve(o);
  auto sampler = make_sampler(s.noise);
  PlanResult plan = plan_and_report(s, *sampler);
  emit_results(plan, {}, o.out);
  return verdict_exit_code(plan.report.verdict);
}

int cmd_simulate(const Overrides& o, std::size_t runs) {
  const ProblemSpec s = resolve(o);
  auto sampler = make_sampler(s.noise);
  PlanResult plan = plan_and_report(s, *sampler);
  const GroupedSystem gsys = group_steps(s.system, s.group);
  std::vector<ControlResult> traj;
  for (std::size_t i = 0; i < runs; ++i) {
    CounterRng rng(s.seed, kMonteCarloStreams | i);
    traj.push_back(online_control(gsys, *plan.graph, plan.lower.policy, s.x0, s.horizon, *sampler, rng));
    std::printf("run %zu: %s after %zu steps\n", i, traj.back().sat ? "sat" : "unsat", traj.back().trajectory.size() - 1);
  }
  emit_results(plan, traj, o.out);
  return verdict_exit_code(plan.report.verdict);
}

int cmd_evaluate(const Overrides& o, std::size_t runs) {
  const ProblemSpec s = resolve(o);
  auto sampler = make_sampler(s.noise);
  PlanResult plan = plan_and_report(s, *sampler);
  const GroupedSystem gsys = group_steps(s.system, s.group);
  const auto mc = monte_carlo(gsys, *plan.graph, plan.lower.policy, s.x0, s.horizon, *sampler, runs, s.seed);
  plan.report.empirical_rate = mc.rate;
  plan.report.empirical_se = mc.standard_error;
  std::printf("empirical: %.6f +- %.6f over %zu runs (certified lower %.6f)\n", mc.rate, mc.standard_error, mc.runs,
              plan.report.iterations.back().lower);
  emit_results(plan, {}, o.out);
  return verdict_exit_code(plan.report.verdict);
}

int cmd_export(const Overrides& o) {
  const ProblemSpec s = resolve(o);
  auto sampler = make_sampler(s.noise);
  PlanResult plan = plan_and_report(s, *sampler);
  std::filesystem::create_directories(o.out);
  const auto dir = std::filesystem::path(o.out);
  export_explicit(*plan.imdp, (dir / "model.sta").string(), (dir / "model.tra").string());
  std::printf("wrote %s and %s\n", (dir / "model.sta").c_str(), (dir / "model.tra").c_str());
  return verdict_exit_code(plan.report.verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAC interval-MDP abstraction and controller synthesis"};
  app.require_subcommand(1);

  Overrides o;
  std::size_t runs = 1;
  std::size_t mc_runs = 10000;

  auto* abstract = app.add_subcommand("abstract", "build states and actions, print model size");
  add_spec_options(abstract, o, false);
  auto* synthesize = app.add_subcommand("synthesize", "run the planning loop and write reports");
  add_spec_options(synthesize, o, false);
  auto* simulate = app.add_subcommand("simulate", "plan, then simulate closed-loop trajectories");
  add_spec_options(simulate, o, false);
  simulate->add_option("--runs", runs, "number of trajectories");
  auto* evaluate = app.add_subcommand("evaluate", "plan, then estimate the satisfaction rate by Monte Carlo");
  add_spec_options(evaluate, o, false);
  evaluate->add_option("--runs", mc_runs, "Monte Carlo runs");
  auto* exp = app.add_subcommand("export", "plan, then write the final model in explicit format");
  add_spec_options(exp, o, false);
  auto* bench = app.add_subcommand("bench", "plan and evaluate a built-in model");
  add_spec_options(bench, o, true);
  bench->add_option("--runs", mc_runs, "Monte Carlo runs");
  auto* list = app.add_subcommand("models", "list built-in models");
  std::string dump_name;
  list->add_option("--dump", dump_name, "print the config of one model");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*abstract) return cmd_abstract(o);
    if (*synthesize) return cmd_synthesize(o);
    if (*simulate) return cmd_simulate(o, runs);
    if (*evaluate || *bench) return cmd_evaluate(o, mc_runs);
    if (*exp) return cmd_export(o);
    if (*list) {
      if (!dump_name.empty()) {
        std::cout << dump_config(builtin_model(dump_name)) << '\n';
        return 0;
      }
      for (const auto& n : builtin_model_names()) std::cout << n << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
