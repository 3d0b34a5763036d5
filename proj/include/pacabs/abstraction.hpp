#pragma once

#include "pacabs/geometry.hpp"
#include "pacabs/imdp.hpp"
#include "pacabs/linsys.hpp"
#include "pacabs/scenario.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pacabs {

/// N noise realizations of the grouped system.
struct SampleSet {
  std::vector<Vector> samples;
  std::uint64_t seed = 0;
  std::string provenance;

  SampleSet() = default;
  SampleSet(std::vector<Vector> s, std::uint64_t seed_ = 0, std::string prov = {});

  std::size_t size() const { return samples.size(); }
  Eigen::Index dim() const { return samples.empty() ? 0 : samples.front().size(); }
};

struct ActionDef {
  ActionId id;
  Vector target;
  std::vector<StateId> enabled_in;
};

/// States (one per cell plus the absorbing state) and actions (one per cell,
/// aimed at its centre) with their enabled sets. Built once and reused for
/// every sample batch.
class StateActionGraph {
 public:
  StateActionGraph(Partition part, std::vector<ActionDef> actions);

  const Partition& partition() const { return part_; }
  const std::vector<ActionDef>& actions() const { return actions_; }
  std::size_t num_states() const { return part_.num_cells() + 1; }
  std::size_t num_actions() const { return actions_.size(); }
  StateId absorbing() const { return part_.num_cells(); }
  const std::vector<ActionId>& enabled(StateId s) const { return enabled_[s]; }
  std::size_t num_choices() const;

  StateId state_of(RegionId r) const { return r.is_absorbing() ? absorbing() : r.flat(); }
  StateId locate(const Vector& x) const { return state_of(part_.locate(x)); }

 private:
  Partition part_;
  std::vector<ActionDef> actions_;
  std::vector<std::vector<ActionId>> enabled_;
};

/// Enabled sets via backward reachability; `input_slack` inflates the input
/// box by an absolute amount in control units (0 for an exact test).
StateActionGraph build_states_actions(const Partition& part, const GroupedSystem& gsys, double input_slack = 0.0);

/// Per-successor sample counts (sparse, sorted by state id, absorbing last).
struct CountVector {
  std::size_t N = 0;
  std::vector<std::pair<StateId, std::size_t>> n_in;

  std::size_t count(StateId s) const;
  std::size_t total() const;
};

CountVector count_successors(const ActionDef& action, const SampleSet& samples, const StateActionGraph& graph);

/// PAC interval per successor with a nonzero count; zero-count successors are omitted.
IntervalRow intervals_for_action(const CountVector& counts, const IntervalTable& table);

/// Point-estimate row [n_in/N, n_in/N]; the non-robust baseline.
IntervalRow frequentist_row(const CountVector& counts);

enum class IntervalSource { Pac, Frequentist };

struct BuildOptions {
  ConfidenceMode mode = ConfidenceMode::Generic;  // Generic or Symmetric
  IntervalSource source = IntervalSource::Pac;
};

struct BuildResult {
  Imdp imdp;
  ConfidenceReport confidence;
};

/// Assembles the interval MDP: one interval row per action, shared by every
/// state that enables it. In symmetric mode successor counts are derived from
/// a single histogram of relative cell offsets.
BuildResult build_imdp(const StateActionGraph& graph, const SampleSet& samples, const IntervalTable& table,
                       StateId initial, BuildOptions opts = {});

/// Distinct offset classes of the symmetric construction: prod(2 r_i - 1).
double symmetric_offset_count(const Partition& part);

}  // namespace pacabs
