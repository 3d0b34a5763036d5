#pragma once

#include "pacabs/geometry.hpp"
#include "pacabs/imdp.hpp"
#include "pacabs/linsys.hpp"
#include "pacabs/noise.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pacabs {

/// Everything needed to run the planning loop on one reach-avoid problem.
struct ProblemSpec {
  std::string name;
  LinearSystem system;
  int group = 1;
  Partition partition;  // goal and critical cells already marked
  /// Absolute inflation of the input box used only for the enabled-action test.
  double input_slack = 0.0;

  Horizon horizon = Horizon::finite(1);
  double eta = 0.0;
  Vector x0;

  std::optional<double> alpha;  // whole-model confidence; beta is derived from it
  std::optional<double> beta;   // per-interval confidence, used as is

  std::size_t N0 = 100;
  double gamma = 2.0;
  std::size_t Nmax = 6400;

  bool symmetric = false;
  int rho = 0;  // 0 disables aggregation

  NoiseSpec noise;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on an inconsistent spec.
  void validate() const;

  ConfidenceMode mode() const;
  /// Per-interval beta: the explicit value, or alpha split over the unique
  /// interval count of the selected mode.
  double per_interval_beta() const;
  /// Whole-model alpha implied by per_interval_beta().
  ConfidenceReport confidence() const;
};

/// Cells whose multi-index lies in [lo, hi] (inclusive, per dimension).
std::vector<std::size_t> cells_in_index_box(const Partition& part, const std::vector<int>& lo,
                                            const std::vector<int>& hi);

/// Names accepted by builtin_model.
std::vector<std::string> builtin_model_names();

/// Built-in benchmarks: bas1, bas2, uav, satellite, double-integrator, and a
/// "-desk" variant of each (coarser grid, shorter horizon). Throws
/// std::invalid_argument on an unknown name.
ProblemSpec builtin_model(const std::string& name);

}  // namespace pacabs
