#pragma once

#include "pacabs/abstraction.hpp"
#include "pacabs/imdp.hpp"
#include "pacabs/models.hpp"
#include "pacabs/noise.hpp"
#include "pacabs/rng.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pacabs {

enum class Verdict { Certified, Unsatisfiable, Inconclusive };

const char* verdict_name(Verdict v);
/// Process exit code: 0 certified, 2 unsatisfiable, 3 inconclusive.
int verdict_exit_code(Verdict v);

struct IterationRecord {
  std::size_t N = 0;
  std::size_t states = 0;
  std::size_t choices = 0;
  std::size_t transitions = 0;
  double lower = 0.0;  // certified lower bound at the initial state
  double upper = 0.0;
  double t_sample = 0.0;  // seconds
  double t_intervals = 0.0;
  double t_solve = 0.0;
};

struct RunReport {
  std::string model;
  std::uint64_t seed = 0;
  double beta = 0.0;
  ConfidenceReport confidence;
  double t_states_actions = 0.0;
  std::vector<IterationRecord> iterations;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<double> empirical_rate;
  std::optional<double> empirical_se;
};

struct PlanResult {
  RunReport report;
  std::optional<TimeVaryingPolicy> policy;  // set when certified
  std::optional<Imdp> imdp;                 // model of the last iteration
  Solution lower;                           // lower-bound solution of the last iteration
  std::optional<StateActionGraph> graph;
};

/// Planning loop: states and actions once, then per iteration a fresh sample
/// batch, intervals, and lower/upper bounds at the initial state. Stops when
/// the lower bound reaches eta (certified), the upper bound drops below eta
/// (unsatisfiable), or the next N would exceed Nmax (inconclusive).
PlanResult offline_plan(const ProblemSpec& spec, NoiseSampler& sampler);

/// Input applied when the state has left the partition; nullopt gives up.
using BackupController = std::function<std::optional<Vector>(const Vector& x, std::size_t k)>;

struct ControlResult {
  bool sat = false;
  std::vector<Vector> trajectory;  // x_0 .. x_last
  std::vector<std::int64_t> actions;
};

/// Closed-loop run under a synthesized policy. `K` is the horizon in grouped
/// steps; an infinite horizon is capped at `max_steps`.
ControlResult online_control(const GroupedSystem& gsys, const StateActionGraph& graph, const TimeVaryingPolicy& policy,
                             const Vector& x0, Horizon K, NoiseSampler& sampler, CounterRng& rng,
                             const BackupController& backup = {}, std::size_t max_steps = 10000);

struct MonteCarloResult {
  std::size_t runs = 0;
  std::size_t successes = 0;
  double rate = 0.0;
  double standard_error = 0.0;  // sqrt(rate (1 - rate) / runs)
};

/// Sampling batches use streams 0, 1, ...; Monte Carlo runs use the upper half.
inline constexpr std::uint64_t kMonteCarloStreams = std::uint64_t{1} << 63;

/// Independent closed-loop runs; run i draws from stream (seed, kMonteCarloStreams | i).
MonteCarloResult monte_carlo(const GroupedSystem& gsys, const StateActionGraph& graph, const TimeVaryingPolicy& policy,
                             const Vector& x0, Horizon K, NoiseSampler& sampler, std::size_t runs, std::uint64_t seed,
                             const BackupController& backup = {});

}  // namespace pacabs
