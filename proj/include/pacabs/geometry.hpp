#pragma once

#include "pacabs/linsys.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace pacabs {

/// Convex polytope {x | M x <= b}.
struct Region {
  Matrix M;
  Vector b;

  Eigen::Index dim() const { return M.cols(); }
  bool contains(const Vector& x, double tol = 1e-9) const;

  static Region from_box(const Box& box);
};

/// Identifies either a partition cell (flat row-major index) or the absorbing
/// complement of the partitioned domain.
class RegionId {
 public:
  static RegionId cell(std::size_t flat) { return RegionId(flat); }
  static RegionId absorbing() { return RegionId(kAbsorbing); }

  bool is_absorbing() const { return id_ == kAbsorbing; }
  std::size_t flat() const { return id_; }

  friend bool operator==(RegionId a, RegionId b) { return a.id_ == b.id_; }

 private:
  static constexpr std::size_t kAbsorbing = std::numeric_limits<std::size_t>::max();
  explicit RegionId(std::size_t id) : id_(id) {}
  std::size_t id_;
};

using MultiIndex = std::vector<int>;

/// Uniform rectangular grid over the box [origin, origin + widths .* counts].
///
/// Cells are half-open [low, high) in every dimension, except the last cell
/// of each dimension which is closed. Goal and critical cells are disjoint.
class Partition {
 public:
  Partition() = default;
  Partition(Vector origin, Vector widths, std::vector<int> counts);

  Eigen::Index dim() const { return origin_.size(); }
  const Vector& origin() const { return origin_; }
  const Vector& widths() const { return widths_; }
  const std::vector<int>& counts() const { return counts_; }
  std::size_t num_cells() const { return num_cells_; }
  Box domain() const;

  RegionId locate(const Vector& x) const;

  std::size_t flat_index(const MultiIndex& idx) const;
  MultiIndex multi_index(std::size_t flat) const;

  Box cell_box(std::size_t flat) const;
  Region cell_region(std::size_t flat) const { return Region::from_box(cell_box(flat)); }
  Vector cell_center(std::size_t flat) const;

  /// All cells whose union is exactly `box`. Throws if the box is not aligned
  /// with cell boundaries (goal/critical sets must be unions of cells).
  std::vector<std::size_t> cells_covering(const Box& box, double tol = 1e-9) const;

  void set_goal(const std::vector<std::size_t>& cells);
  void set_critical(const std::vector<std::size_t>& cells);
  bool is_goal(std::size_t flat) const { return goal_[flat] != 0; }
  bool is_critical(std::size_t flat) const { return critical_[flat] != 0; }
  std::vector<std::size_t> goal_cells() const;
  std::vector<std::size_t> critical_cells() const;

 private:
  Vector origin_;
  Vector widths_;
  std::vector<int> counts_;
  std::vector<std::size_t> strides_;
  std::size_t num_cells_ = 0;
  std::vector<char> goal_;
  std::vector<char> critical_;
};

/// Center of a largest inscribed ball, from a small LP. Throws on empty or
/// unbounded regions. Ties are resolved by the deterministic simplex pivoting.
Vector chebyshev_center(const Region& reg);

/// Scales `reg` about `center`: M x <= lambda b + (1 - lambda) M center.
Region scale_polytope(const Region& reg, const Vector& center, double lambda);

/// Set of states from which some admissible input moves the noiseless
/// successor exactly onto d. Requires an invertible A_bar.
Region backward_reachable_set(const GroupedSystem& gsys, const Vector& d);

/// True iff every vertex of `cell` admits an input in the (slack-inflated)
/// input box that steers it onto d.
bool region_in_brs(const GroupedSystem& gsys, const Box& cell, const Vector& d, double input_slack = 0.0);

/// Batched version of region_in_brs for one grouped system.
///
/// For square invertible B_bar the vertex test reduces to a box test on
/// c = B_bar^{-1}(d - q_bar): c_j must lie in [lo_j + max_v (B^{-1}A v)_j,
/// hi_j + min_v (B^{-1}A v)_j]. Otherwise every vertex is checked with an LP.
class BrsContainment {
 public:
  explicit BrsContainment(const GroupedSystem& gsys, double input_slack = 0.0);

  bool contains(const Box& cell, const Vector& d) const;

  /// Box of admissible B^{-1}(d - q) for `cell`; empty optional if the
  /// closed form is unavailable (non-square B_bar).
  std::optional<Box> target_window(const Box& cell) const;
  /// B^{-1}(d - q) for a target, valid when target_window() is available.
  Vector target_coordinates(const Vector& d) const;
  bool closed_form() const { return closed_form_; }

 private:
  const GroupedSystem* gsys_;
  double slack_;
  bool closed_form_ = false;
  Matrix Binv_;
  Matrix BinvA_;
};

}  // namespace pacabs
