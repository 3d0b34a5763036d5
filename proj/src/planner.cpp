#include "pacabs/planner.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace pacabs {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "certified";
    case Verdict::Unsatisfiable: return "unsatisfiable";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

int verdict_exit_code(Verdict v) {
  switch (v) {
    case Verdict::Certified: return 0;
    case Verdict::Unsatisfiable: return 2;
    case Verdict::Inconclusive: return 3;
  }
  return 1;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

TableCache& table_cache() {
  static TableCache cache;
  return cache;
}

}  // namespace

PlanResult offline_plan(const ProblemSpec& spec, NoiseSampler& sampler) {
  spec.validate();
  PlanResult res;
  RunReport& rep = res.report;
  rep.model = spec.name;
  rep.seed = spec.seed;
  rep.beta = spec.per_interval_beta();
  rep.confidence = spec.confidence();

  const GroupedSystem gsys = group_steps(spec.system, spec.group);
  auto t0 = Clock::now();
  res.graph.emplace(build_states_actions(spec.partition, gsys, spec.input_slack));
  rep.t_states_actions = seconds_since(t0);
  const StateActionGraph& graph = *res.graph;
  const StateId s_init = graph.locate(spec.x0);

  BuildOptions opts;
  opts.mode = spec.symmetric ? ConfidenceMode::Symmetric : ConfidenceMode::Generic;

  std::size_t N = spec.N0;
  for (std::uint64_t iter = 0;; ++iter) {
    IterationRecord rec;
    rec.N = N;

    t0 = Clock::now();
    CounterRng rng(spec.seed, iter);
    const SampleSet samples = draw_samples(sampler, gsys, N, rng);
    rec.t_sample = seconds_since(t0);

    t0 = Clock::now();
    const auto table = table_cache().get(N, rep.beta);
    BuildResult built = build_imdp(graph, samples, *table, s_init, opts);
    rec.t_intervals = seconds_since(t0);

    t0 = Clock::now();
    Solution lower;
    if (spec.rho > 0) {
      AggregatedSolution agg = improved_synthesis(built.imdp, *spec.horizon.steps, spec.rho);
      lower = std::move(agg.solution);
      rep.confidence = agg.confidence;
    } else {
      lower = robust_value_iteration(built.imdp, spec.horizon, Bound::Lower);
      rep.confidence = built.confidence;
    }
    const Solution upper = robust_value_iteration(built.imdp, spec.horizon, Bound::Upper);
    rec.t_solve = seconds_since(t0);

    rec.states = built.imdp.num_states();
    rec.choices = built.imdp.num_choices();
    rec.transitions = built.imdp.num_transitions();
    rec.lower = lower.values[s_init];
    rec.upper = upper.values[s_init];
    rep.iterations.push_back(rec);

    res.imdp.emplace(std::move(built.imdp));
    res.lower = std::move(lower);

    if (rec.lower >= spec.eta) {
      rep.verdict = Verdict::Certified;
      res.policy = res.lower.policy;
      return res;
    }
    if (rec.upper < spec.eta) {
      rep.verdict = Verdict::Unsatisfiable;
      return res;
    }
    const auto next = static_cast<std::size_t>(std::ceil(spec.gamma * static_cast<double>(N)));
    if (next > spec.Nmax) {
      rep.verdict = Verdict::Inconclusive;
      return res;
    }
    N = next;
  }
}

ControlResult online_control(const GroupedSystem& gsys, const StateActionGraph& graph, const TimeVaryingPolicy& policy,
                             const Vector& x0, Horizon K, NoiseSampler& sampler, CounterRng& rng,
                             const BackupController& backup, std::size_t max_steps) {
  ControlResult out;
  const Partition& part = graph.partition();
  const std::size_t limit = K.is_finite() ? static_cast<std::size_t>(*K.steps) : max_steps;
  Vector x = x0;
  out.trajectory.push_back(x);
  for (std::size_t k = 0;; ++k) {
    const RegionId r = part.locate(x);
    if (!r.is_absorbing()) {
      if (part.is_goal(r.flat())) {
        out.sat = true;
        return out;
      }
      if (part.is_critical(r.flat())) return out;
    }
    if (k >= limit) return out;

    Vector u;
    if (r.is_absorbing()) {
      if (!backup) return out;
      auto b = backup(x, k);
      if (!b) return out;
      u = std::move(*b);
      out.actions.push_back(kNoAction);
    } else {
      const std::int64_t a = policy.action(r.flat(), policy.stationary() ? 0 : k);
      if (a == kNoAction) return out;
      out.actions.push_back(a);
      u = control_input(gsys, x, graph.actions()[static_cast<std::size_t>(a)].target);
    }
    x = successor(gsys, x, u, sampler.draw_grouped(gsys, rng));
    out.trajectory.push_back(x);
  }
}

MonteCarloResult monte_carlo(const GroupedSystem& gsys, const StateActionGraph& graph, const TimeVaryingPolicy& policy,
                             const Vector& x0, Horizon K, NoiseSampler& sampler, std::size_t runs, std::uint64_t seed,
                             const BackupController& backup) {
  if (runs == 0) throw std::invalid_argument("need at least one run");
  MonteCarloResult mc;
  mc.runs = runs;
  for (std::size_t i = 0; i < runs; ++i) {
    CounterRng rng(seed, kMonteCarloStreams | i);
    if (online_control(gsys, graph, policy, x0, K, sampler, rng, backup).sat) ++mc.successes;
  }
  mc.rate = static_cast<double>(mc.successes) / static_cast<double>(runs);
  mc.standard_error = std::sqrt(mc.rate * (1.0 - mc.rate) / static_cast<double>(runs));
  return mc;
}

}  // namespace pacabs
