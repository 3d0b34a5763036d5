#include "pacabs/geometry.hpp"

#include "pacabs/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pacabs {

bool Region::contains(const Vector& x, double tol) const {
  return ((M * x - b).array() <= tol).all();
}

Region Region::from_box(const Box& box) {
  const auto n = box.dim();
  Region r;
  r.M = Matrix::Zero(2 * n, n);
  r.b = Vector(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r.M(2 * i, i) = 1.0;
    r.b(2 * i) = box.upper(i);
    r.M(2 * i + 1, i) = -1.0;
    r.b(2 * i + 1) = -box.lower(i);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(Vector origin, Vector widths, std::vector<int> counts)
    : origin_(std::move(origin)), widths_(std::move(widths)), counts_(std::move(counts)) {
  const auto n = origin_.size();
  if (widths_.size() != n || static_cast<Eigen::Index>(counts_.size()) != n || n == 0) {
    throw std::invalid_argument("partition origin, widths and counts must share one nonzero dimension");
  }
  if ((widths_.array() <= 0.0).any()) {
    throw std::invalid_argument("partition widths must be positive");
  }
  strides_.assign(n, 1);
  num_cells_ = 1;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    if (counts_[i] < 1) throw std::invalid_argument("partition counts must be >= 1");
    strides_[i] = num_cells_;
    num_cells_ *= static_cast<std::size_t>(counts_[i]);
  }
  goal_.assign(num_cells_, 0);
  critical_.assign(num_cells_, 0);
}

Box Partition::domain() const {
  Vector hi = origin_;
  for (Eigen::Index i = 0; i < dim(); ++i) hi(i) += widths_(i) * counts_[i];
  return Box(origin_, hi);
}

RegionId Partition::locate(const Vector& x) const {
  std::size_t flat = 0;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    const double t = (x(i) - origin_(i)) / widths_(i);
    if (!(t >= 0.0) || t > counts_[i]) return RegionId::absorbing();
    auto k = static_cast<int>(std::floor(t));
    if (k >= counts_[i]) k = counts_[i] - 1;
    flat += static_cast<std::size_t>(k) * strides_[i];
  }
  return RegionId::cell(flat);
}

std::size_t Partition::flat_index(const MultiIndex& idx) const {
  if (static_cast<Eigen::Index>(idx.size()) != dim()) throw std::invalid_argument("multi-index dimension mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= counts_[i]) throw std::out_of_range("cell index out of range");
    flat += static_cast<std::size_t>(idx[i]) * strides_[i];
  }
  return flat;
}

MultiIndex Partition::multi_index(std::size_t flat) const {
  if (flat >= num_cells_) throw std::out_of_range("flat cell index out of range");
  MultiIndex idx(dim());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    idx[i] = static_cast<int>(flat / strides_[i]);
    flat %= strides_[i];
  }
  return idx;
}

Box Partition::cell_box(std::size_t flat) const {
  const auto idx = multi_index(flat);
  Vector lo(dim()), hi(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    lo(i) = origin_(i) + widths_(i) * idx[i];
    hi(i) = origin_(i) + widths_(i) * (idx[i] + 1);
  }
  return Box(lo, hi);
}

Vector Partition::cell_center(std::size_t flat) const {
  const auto idx = multi_index(flat);
  Vector c(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) c(i) = origin_(i) + widths_(i) * (idx[i] + 0.5);
  return c;
}

std::vector<std::size_t> Partition::cells_covering(const Box& box, double tol) const {
  if (box.dim() != dim()) throw std::invalid_argument("box dimension mismatch");
  std::vector<int> lo(dim()), hi(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    const double a = (box.lower(i) - origin_(i)) / widths_(i);
    const double b = (box.upper(i) - origin_(i)) / widths_(i);
    const double ra = std::round(a), rb = std::round(b);
    if (std::abs(a - ra) > tol || std::abs(b - rb) > tol) {
      throw std::invalid_argument("region is not aligned with the partition in dimension " + std::to_string(i));
    }
    lo[i] = std::max(0, static_cast<int>(ra));
    hi[i] = std::min(counts_[i], static_cast<int>(rb));
    if (ra < 0 || rb > counts_[i]) {
      throw std::invalid_argument("region extends beyond the partitioned domain in dimension " + std::to_string(i));
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t flat = 0; flat < num_cells_; ++flat) {
    const auto idx = multi_index(flat);
    bool inside = true;
    for (std::size_t i = 0; i < idx.size() && inside; ++i) inside = idx[i] >= lo[i] && idx[i] < hi[i];
    if (inside) out.push_back(flat);
  }
  return out;
}

void Partition::set_goal(const std::vector<std::size_t>& cells) {
  for (auto c : cells) {
    if (c >= num_cells_) throw std::out_of_range("goal cell out of range");
    if (critical_[c]) throw std::invalid_argument("goal and critical cells must be disjoint");
    goal_[c] = 1;
  }
}

void Partition::set_critical(const std::vector<std::size_t>& cells) {
  for (auto c : cells) {
    if (c >= num_cells_) throw std::out_of_range("critical cell out of range");
    if (goal_[c]) throw std::invalid_argument("goal and critical cells must be disjoint");
    critical_[c] = 1;
  }
}

std::vector<std::size_t> Partition::goal_cells() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < num_cells_; ++i)
    if (goal_[i]) out.push_back(i);
  return out;
}

std::vector<std::size_t> Partition::critical_cells() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < num_cells_; ++i)
    if (critical_[i]) out.push_back(i);
  return out;
}

// ---------------------------------------------------------------------------
// Polytopes

Vector chebyshev_center(const Region& reg) {
  const auto m = reg.M.rows();
  const auto n = reg.M.cols();
  // Variables (x, r); maximize r subject to M_i x + |M_i| r <= b_i, r >= 0.
  Matrix A(m + 1, n + 1);
  Vector b(m + 1);
  A.topLeftCorner(m, n) = reg.M;
  A.topRightCorner(m, 1) = reg.M.rowwise().norm();
  b.head(m) = reg.b;
  A.row(m).setZero();
  A(m, n) = -1.0;
  b(m) = 0.0;
  Vector c = Vector::Zero(n + 1);
  c(n) = 1.0;
  const auto res = solve_lp_free(c, A, b);
  if (res.status == LpStatus::Infeasible) throw std::invalid_argument("chebyshev_center: empty region");
  if (res.status == LpStatus::Unbounded) throw std::invalid_argument("chebyshev_center: unbounded region");
  return res.x.head(n);
}

Region scale_polytope(const Region& reg, const Vector& center, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("scale factor must be non-negative");
  Region out;
  out.M = reg.M;
  out.b = lambda * reg.b + (1.0 - lambda) * (reg.M * center);
  return out;
}

namespace {

// Halfspace description of the zonotope z0 + G [-1,1]^m, G of full row rank.
Region zonotope_hrep(const Vector& z0, const Matrix& G_in) {
  const auto n = z0.size();
  std::vector<Eigen::Index> live;
  for (Eigen::Index j = 0; j < G_in.cols(); ++j)
    if (G_in.col(j).norm() > 0.0) live.push_back(j);
  Matrix G(n, static_cast<Eigen::Index>(live.size()));
  for (std::size_t j = 0; j < live.size(); ++j) G.col(static_cast<Eigen::Index>(j)) = G_in.col(live[j]);
  if (numerical_rank(G) < n) {
    throw std::invalid_argument("backward reachable set has empty interior (input map not full row rank)");
  }

  std::vector<Vector> normals;
  if (n == 1) {
    normals.push_back(Vector::Ones(1));
  } else {
    // Each facet normal is orthogonal to n-1 linearly independent generators.
    const auto m = G.cols();
    std::vector<int> pick(static_cast<std::size_t>(n - 1));
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      Matrix S(n - 1, n);
      for (Eigen::Index k = 0; k < n - 1; ++k) S.row(k) = G.col(pick[k]).transpose();
      Eigen::FullPivLU<Matrix> lu(S);
      lu.setThreshold(1e-12);
      if (lu.rank() == n - 1) {
        Vector h = lu.kernel().col(0);
        h.normalize();
        bool dup = false;
        for (const auto& e : normals) {
          if ((e - h).norm() < 1e-9 || (e + h).norm() < 1e-9) {
            dup = true;
            break;
          }
        }
        if (!dup) normals.push_back(h);
      }
      // Next combination.
      Eigen::Index k = n - 2;
      while (k >= 0 && pick[k] == m - (n - 1) + k) --k;
      if (k < 0) break;
      ++pick[k];
      for (Eigen::Index t = k + 1; t < n - 1; ++t) pick[t] = pick[t - 1] + 1;
    }
  }

  Region z;
  const auto f = static_cast<Eigen::Index>(normals.size());
  z.M.resize(2 * f, n);
  z.b.resize(2 * f);
  for (Eigen::Index i = 0; i < f; ++i) {
    const Vector& h = normals[i];
    const double delta = (h.transpose() * G).cwiseAbs().sum();
    const double mid = h.dot(z0);
    z.M.row(2 * i) = h.transpose();
    z.b(2 * i) = mid + delta;
    z.M.row(2 * i + 1) = -h.transpose();
    z.b(2 * i + 1) = -mid + delta;
  }
  return z;
}

std::vector<Vector> box_vertices(const Box& box) {
  const auto n = box.dim();
  std::vector<Vector> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = (mask >> i) & 1U ? box.upper(i) : box.lower(i);
    out.push_back(std::move(v));
  }
  return out;
}

// Is there u in the slack-inflated input box with B u = r?
bool input_feasible(const Matrix& B, const Box& ubox, const Vector& r, double slack) {
  const auto n = B.rows();
  const auto p = B.cols();
  const Vector lo = ubox.lower.array() - slack;
  const Vector width = (ubox.upper - ubox.lower).array() + 2.0 * slack;
  // Shift u = lo + y, y >= 0, y <= width, B y = r - B lo (as two inequalities).
  const Vector rhs = r - B * lo;
  constexpr double eq_tol = 1e-9;
  Matrix A(p + 2 * n, p);
  Vector b(p + 2 * n);
  A.topRows(p) = Matrix::Identity(p, p);
  b.head(p) = width;
  A.middleRows(p, n) = B;
  b.segment(p, n) = rhs.array() + eq_tol;
  A.bottomRows(n) = -B;
  b.tail(n) = -rhs.array() + eq_tol;
  return solve_lp(Vector::Zero(p), A, b).status == LpStatus::Optimal;
}

}  // namespace

Region backward_reachable_set(const GroupedSystem& gsys, const Vector& d) {
  const auto n = gsys.n();
  if (numerical_rank(gsys.A()) < n) {
    throw std::invalid_argument("backward_reachable_set: A_bar is singular");
  }
  const Box& U = gsys.input_box();
  const Vector half = 0.5 * (U.upper - U.lower);
  // A x = d - q - B u  with u in U: a zonotope centred at d - q - B u_mid.
  const Vector z0 = d - gsys.q() - gsys.B() * U.center();
  const Matrix G = gsys.B() * half.asDiagonal();
  Region z = zonotope_hrep(z0, G);
  Region out;
  out.M = z.M * gsys.A();
  out.b = z.b;
  return out;
}

bool region_in_brs(const GroupedSystem& gsys, const Box& cell, const Vector& d, double input_slack) {
  const bool square = gsys.p() == gsys.n() && gsys.full_row_rank();
  const Box& U = gsys.input_box();
  for (const auto& v : box_vertices(cell)) {
    const Vector r = d - gsys.q() - gsys.A() * v;
    if (square) {
      const Vector u = gsys.B_pinv() * r;
      if (!U.contains(u, input_slack)) return false;
    } else if (!input_feasible(gsys.B(), U, r, input_slack)) {
      return false;
    }
  }
  return true;
}

BrsContainment::BrsContainment(const GroupedSystem& gsys, double input_slack)
    : gsys_(&gsys), slack_(input_slack) {
  closed_form_ = gsys.p() == gsys.n() && gsys.full_row_rank();
  if (closed_form_) {
    Binv_ = gsys.B_pinv();
    BinvA_ = Binv_ * gsys.A();
  }
}

std::optional<Box> BrsContainment::target_window(const Box& cell) const {
  if (!closed_form_) return std::nullopt;
  const Vector mid = cell.center();
  const Vector half = 0.5 * (cell.upper - cell.lower);
  const Vector centre_term = BinvA_ * mid;
  const Vector spread = BinvA_.cwiseAbs() * half;
  const Box& U = gsys_->input_box();
  Vector lo = (U.lower.array() - slack_) + (centre_term + spread).array();
  Vector hi = (U.upper.array() + slack_) + (centre_term - spread).array();
  // An empty window (lo > hi) is kept as-is; contains() then rejects every target.
  Box out;
  out.lower = std::move(lo);
  out.upper = std::move(hi);
  return out;
}

Vector BrsContainment::target_coordinates(const Vector& d) const { return Binv_ * (d - gsys_->q()); }

bool BrsContainment::contains(const Box& cell, const Vector& d) const {
  if (!closed_form_) return region_in_brs(*gsys_, cell, d, slack_);
  const auto win = target_window(cell);
  const Vector c = target_coordinates(d);
  return (c.array() >= win->lower.array()).all() && (c.array() <= win->upper.array()).all();
}

}  // namespace pacabs
