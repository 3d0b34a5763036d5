#pragma once

#include "pacabs/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pacabs {

using StateId = std::size_t;
using ActionId = std::size_t;

inline constexpr std::int64_t kNoAction = -1;

struct Transition {
  StateId dst;
  ProbInterval iv;
  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Sparse interval row sorted by successor; absent successors mean [0,0].
using IntervalRow = std::vector<Transition>;

enum class StateLabel : std::uint8_t { None, Goal, Critical, Absorbing };

enum class ConfidenceMode { Generic, Symmetric, Aggregated };

/// Links the per-interval confidence beta to the whole-model parameter alpha
/// through the number of unique probability intervals.
struct ConfidenceReport {
  double beta = 0.0;
  ConfidenceMode mode = ConfidenceMode::Generic;
  double unique_interval_count = 0.0;
  double alpha = 0.0;
  int rho = 0;
  int horizon = 0;
};

ConfidenceReport generic_confidence(double beta, std::size_t num_actions, std::size_t num_states);
/// `counts` are the cells per dimension of a uniform grid with centre targets.
ConfidenceReport symmetric_confidence(double beta, const std::vector<int>& counts, std::size_t num_actions);
ConfidenceReport aggregated_confidence(double beta, int rho, int horizon, std::size_t num_actions);

/// Interval MDP with one interval row per action, shared by every state in
/// which that action is enabled.
class Imdp {
 public:
  Imdp(std::vector<StateLabel> labels, StateId initial, std::vector<std::vector<ActionId>> enabled,
       std::vector<IntervalRow> rows);

  std::size_t num_states() const { return labels_.size(); }
  std::size_t num_actions() const { return rows_.size(); }
  StateLabel label(StateId s) const { return labels_[s]; }
  bool is_goal(StateId s) const { return labels_[s] == StateLabel::Goal; }
  /// Critical or absorbing: the property fails on entry.
  bool is_losing(StateId s) const {
    return labels_[s] == StateLabel::Critical || labels_[s] == StateLabel::Absorbing;
  }
  StateId initial() const { return initial_; }
  void set_initial(StateId s);

  const std::vector<ActionId>& enabled(StateId s) const { return enabled_[s]; }
  const IntervalRow& row(ActionId a) const { return rows_[a]; }

  /// Number of (state, action) pairs.
  std::size_t num_choices() const;
  /// Number of (state, action, successor) triples with a nonzero interval.
  std::size_t num_transitions() const;

  std::size_t num_samples = 0;
  double beta = 0.0;

 private:
  std::vector<StateLabel> labels_;
  StateId initial_;
  std::vector<std::vector<ActionId>> enabled_;
  std::vector<IntervalRow> rows_;
};

/// Does the row admit a distribution (sum low <= 1 <= sum up, within tol)?
bool row_admits_distribution(std::span<const Transition> row, double tol = 1e-9);

using ValueVector = std::vector<double>;

enum class Sense { Min, Max };

struct InnerResult {
  double expectation = 0.0;
  std::vector<double> witness;  // aligned with the row entries
};

/// Worst-case (Min) or best-case (Max) expectation of `values` over all
/// distributions inside the row's intervals. Successors are visited in value
/// order (ties by ascending state id), each starting at its lower bound, and
/// the remaining mass is handed out greedily up to the upper bounds.
InnerResult inner_extreme(std::span<const Transition> row, std::span<const double> values, Sense sense);

struct Horizon {
  std::optional<int> steps;  // nullopt = unbounded
  static Horizon finite(int K) { return Horizon{K}; }
  static Horizon infinite() { return Horizon{std::nullopt}; }
  bool is_finite() const { return steps.has_value(); }
};

enum class Bound { Lower, Upper };

/// (state, k) -> action. Stationary policies have a single time slice.
class TimeVaryingPolicy {
 public:
  TimeVaryingPolicy() = default;
  TimeVaryingPolicy(std::vector<std::vector<std::int64_t>> slices, bool stationary);

  bool stationary() const { return stationary_; }
  /// Number of time steps covered (K for finite horizons, 1 if stationary).
  std::size_t horizon() const { return slices_.size(); }
  std::int64_t action(StateId s, std::size_t k) const;
  const std::vector<std::vector<std::int64_t>>& slices() const { return slices_; }

 private:
  std::vector<std::vector<std::int64_t>> slices_;
  bool stationary_ = false;
};

struct Solution {
  ValueVector values;                // at k = 0
  std::vector<ValueVector> per_step;  // finite horizons: index k = 0..K
  TimeVaryingPolicy policy;
  int iterations = 0;
};

inline constexpr double kDefaultViTol = 1e-6;

/// Robust value iteration for the max-lower (or max-upper) reach-avoid bound.
Solution robust_value_iteration(const Imdp& m, Horizon horizon, Bound bound, double tol = kDefaultViTol);

struct AggregateStep {
  ValueVector values;
  std::vector<std::int64_t> actions;
  std::size_t merged_transitions = 0;
};

/// Bin index of a value for rho equal-width bins over [0, 1].
int value_bin(double v, int rho);

/// One lower-bound backup over the model whose successors are merged into
/// rho value bins (each bin valued at its smallest member).
AggregateStep aggregate_backup(const Imdp& m, const ValueVector& next_values, int rho);

struct AggregatedSolution {
  Solution solution;
  ConfidenceReport confidence;
};

/// Backward-in-time synthesis with a fresh aggregation at every step.
AggregatedSolution improved_synthesis(const Imdp& m, int K, int rho);

void export_explicit(const Imdp& m, const std::string& states_path, const std::string& transitions_path);
Imdp parse_explicit(const std::string& states_path, const std::string& transitions_path);

}  // namespace pacabs
