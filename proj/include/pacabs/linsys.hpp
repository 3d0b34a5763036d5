#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace pacabs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Axis-aligned box {x | lower <= x <= upper}.
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector hi);

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Vector& x, double slack = 0.0) const;
  Vector center() const { return 0.5 * (lower + upper); }
};

/// Discrete-time linear system x+ = A x + B u + q + w with box-constrained inputs.
class LinearSystem {
 public:
  LinearSystem() = default;
  LinearSystem(Matrix A, Matrix B, Vector q, Box input_box);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  const Vector& q() const { return q_; }
  const Box& input_box() const { return input_box_; }
  Eigen::Index n() const { return A_.rows(); }
  Eigen::Index p() const { return B_.cols(); }

 private:
  Matrix A_;
  Matrix B_;
  Vector q_;
  Box input_box_;
};

/// A linear system with `group` consecutive steps merged into one:
///   A_bar = A^g, B_bar = [A^{g-1}B ... AB B], q_bar = sum_{i<g} A^i q.
/// The grouped noise is w_bar = sum_{i<g} A^i w_{k+g-1-i}; samplers realize it.
class GroupedSystem {
 public:
  GroupedSystem(LinearSystem base, int group);

  const LinearSystem& base() const { return base_; }
  int group() const { return group_; }
  const Matrix& A() const { return A_bar_; }
  const Matrix& B() const { return B_bar_; }
  const Vector& q() const { return q_bar_; }
  const Box& input_box() const { return input_box_bar_; }
  Eigen::Index n() const { return A_bar_.rows(); }
  Eigen::Index p() const { return B_bar_.cols(); }

  bool full_row_rank() const { return full_row_rank_; }
  const Matrix& B_pinv() const { return B_pinv_; }

  /// Combines one base-noise vector per merged step (oldest first) into w_bar.
  Vector combine_noise(const std::vector<Vector>& base_noise) const;

 private:
  LinearSystem base_;
  int group_;
  Matrix A_bar_;
  Matrix B_bar_;
  Vector q_bar_;
  Box input_box_bar_;
  Matrix B_pinv_;
  bool full_row_rank_ = false;
};

class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultRankTol = 1e-10;

/// Numerical rank with singular values judged relative to the largest one.
Eigen::Index numerical_rank(const Matrix& M, double rank_tol = kDefaultRankTol);

bool is_controllable(const LinearSystem& sys, double rank_tol = kDefaultRankTol);

GroupedSystem group_steps(const LinearSystem& sys, int g);

/// Minimum-norm input steering the noiseless successor onto d (B_bar^+ (d - q_bar - A_bar x)).
Vector control_input(const GroupedSystem& gsys, const Vector& x, const Vector& d);

/// A_bar x + B_bar u + q_bar + w.
Vector successor(const GroupedSystem& gsys, const Vector& x, const Vector& u, const Vector& w);

}  // namespace pacabs
