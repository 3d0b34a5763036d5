#include "pacabs/linsys.hpp"

#include <iostream>
#include <string>

namespace pacabs {

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) {
    throw std::invalid_argument("box bounds differ in dimension");
  }
  if ((lower.array() > upper.array()).any()) {
    throw std::invalid_argument("box lower bound exceeds upper bound");
  }
}

bool Box::contains(const Vector& x, double slack) const {
  return x.size() == lower.size() && (x.array() >= lower.array() - slack).all() &&
         (x.array() <= upper.array() + slack).all();
}

LinearSystem::LinearSystem(Matrix A, Matrix B, Vector q, Box input_box)
    : A_(std::move(A)), B_(std::move(B)), q_(std::move(q)), input_box_(std::move(input_box)) {
  if (A_.rows() != A_.cols()) {
    throw std::invalid_argument("A must be square");
  }
  if (B_.rows() != A_.rows()) {
    throw std::invalid_argument("B must have as many rows as A");
  }
  if (q_.size() != A_.rows()) {
    throw std::invalid_argument("q must have the state dimension");
  }
  if (input_box_.dim() != B_.cols()) {
    throw std::invalid_argument("input box dimension must match the columns of B");
  }
}

Eigen::Index numerical_rank(const Matrix& M, double rank_tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) >= rank_tol * sv(0)) ++r;
  }
  return r;
}

bool is_controllable(const LinearSystem& sys, double rank_tol) {
  const auto n = sys.n();
  const auto p = sys.p();
  Matrix C(n, n * p);
  Matrix block = sys.B();
  for (Eigen::Index i = 0; i < n; ++i) {
    C.middleCols(i * p, p) = block;
    block = sys.A() * block;
  }
  return numerical_rank(C, rank_tol) == n;
}

GroupedSystem::GroupedSystem(LinearSystem base, int group) : base_(std::move(base)), group_(group) {
  if (group_ < 1) {
    throw std::invalid_argument("group factor must be >= 1, got " + std::to_string(group_));
  }
  const auto n = base_.n();
  const auto p = base_.p();
  A_bar_ = Matrix::Identity(n, n);
  B_bar_.resize(n, group_ * p);
  q_bar_ = Vector::Zero(n);
  Vector lo(group_ * p), hi(group_ * p);
  // Column block j multiplies u_{k+j}, which is propagated by A^{g-1-j}.
  for (int j = group_ - 1; j >= 0; --j) {
    B_bar_.middleCols(j * p, p) = A_bar_ * base_.B();
    q_bar_ += A_bar_ * base_.q();
    A_bar_ = A_bar_ * base_.A();
    lo.segment(j * p, p) = base_.input_box().lower;
    hi.segment(j * p, p) = base_.input_box().upper;
  }
  input_box_bar_ = Box(lo, hi);

  full_row_rank_ = numerical_rank(B_bar_) == n;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(B_bar_);
  cod.setThreshold(kDefaultRankTol);
  B_pinv_ = cod.pseudoInverse();
}

Vector GroupedSystem::combine_noise(const std::vector<Vector>& base_noise) const {
  if (static_cast<int>(base_noise.size()) != group_) {
    throw std::invalid_argument("need one noise vector per merged step");
  }
  // w_bar = sum_j A^{g-1-j} w_{k+j}
  Vector w = Vector::Zero(n());
  for (const auto& wj : base_noise) {
    w = base_.A() * w + wj;
  }
  return w;
}

GroupedSystem group_steps(const LinearSystem& sys, int g) { return GroupedSystem(sys, g); }

Vector control_input(const GroupedSystem& gsys, const Vector& x, const Vector& d) {
  if (!gsys.full_row_rank()) {
    throw RankDeficientError("grouped input matrix is not full row rank; increase the group factor");
  }
  return gsys.B_pinv() * (d - gsys.q() - gsys.A() * x);
}

Vector successor(const GroupedSystem& gsys, const Vector& x, const Vector& u, const Vector& w) {
  if (!gsys.input_box().contains(u, 1e-9)) {
    static thread_local bool warned = false;
    if (!warned) {
      std::cerr << "warning: control input outside the input box\n";
      warned = true;
    }
  }
  return gsys.A() * x + gsys.B() * u + gsys.q() + w;
}

}  // namespace pacabs
