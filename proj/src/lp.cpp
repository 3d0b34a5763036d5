#include "pacabs/lp.hpp"

#include <limits>
#include <vector>

namespace pacabs {
namespace {

// Tableau simplex with an auxiliary column for phase one. Row m holds the
// objective, row m+1 the phase-one objective; column n is the auxiliary
// variable and column n+1 the right-hand side.
class Tableau {
 public:
  Tableau(const Vector& c, const Matrix& A, const Vector& b, double eps)
      : m_(static_cast<int>(A.rows())),
        n_(static_cast<int>(A.cols())),
        eps_(eps),
        D_(m_ + 2, std::vector<double>(n_ + 2, 0.0)),
        basis_(m_),
        nonbasis_(n_ + 1) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) D_[i][j] = A(i, j);
      D_[i][n_] = -1.0;
      D_[i][n_ + 1] = b(i);
      basis_[i] = n_ + i;
    }
    for (int j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      D_[m_][j] = -c(j);
    }
    nonbasis_[n_] = -1;
    D_[m_ + 1][n_] = 1.0;
  }

  LpResult solve() {
    LpResult res;
    int r = 0;
    for (int i = 1; i < m_; ++i) {
      if (D_[i][n_ + 1] < D_[r][n_ + 1]) r = i;
    }
    if (m_ > 0 && D_[r][n_ + 1] < -eps_) {
      pivot(r, n_);
      if (!run(1) || D_[m_ + 1][n_ + 1] < -eps_) {
        res.status = LpStatus::Infeasible;
        return res;
      }
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        int s = -1;
        for (int j = 0; j <= n_; ++j) {
          if (s == -1 || D_[i][j] < D_[i][s] || (D_[i][j] == D_[i][s] && nonbasis_[j] < nonbasis_[s])) {
            s = j;
          }
        }
        pivot(i, s);
      }
    }
    if (!run(2)) {
      res.status = LpStatus::Unbounded;
      res.value = std::numeric_limits<double>::infinity();
      return res;
    }
    res.status = LpStatus::Optimal;
    res.x = Vector::Zero(n_);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= 0 && basis_[i] < n_) res.x(basis_[i]) = D_[i][n_ + 1];
    }
    res.value = D_[m_][n_ + 1];
    return res;
  }

 private:
  void pivot(int r, int s) {
    const double inv = 1.0 / D_[r][s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double f = D_[i][s] * inv;
      if (f == 0.0) continue;
      for (int j = 0; j < n_ + 2; ++j) {
        if (j != s) D_[i][j] -= D_[r][j] * f;
      }
      D_[i][s] = -f;
    }
    for (int j = 0; j < n_ + 2; ++j) {
      if (j != s) D_[r][j] *= inv;
    }
    D_[r][s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  bool run(int phase) {
    const int x = phase == 1 ? m_ + 1 : m_;
    while (true) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasis_[j] == -1) continue;
        if (D_[x][j] < -eps_ && (s == -1 || nonbasis_[j] < nonbasis_[s])) s = j;
      }
      if (s == -1) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (D_[i][s] < eps_) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = D_[i][n_ + 1] / D_[i][s];
        const double rhs = D_[r][n_ + 1] / D_[r][s];
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  int m_;
  int n_;
  double eps_;
  std::vector<std::vector<double>> D_;
  std::vector<int> basis_;
  std::vector<int> nonbasis_;
};

}  // namespace

LpResult solve_lp(const Vector& c, const Matrix& A, const Vector& b, double eps) {
  if (A.cols() != c.size() || A.rows() != b.size()) {
    throw std::invalid_argument("solve_lp: dimension mismatch");
  }
  return Tableau(c, A, b, eps).solve();
}

LpResult solve_lp_free(const Vector& c, const Matrix& A, const Vector& b, double eps) {
  const auto n = A.cols();
  Matrix A2(A.rows(), 2 * n);
  A2 << A, -A;
  Vector c2(2 * n);
  c2 << c, -c;
  LpResult res = solve_lp(c2, A2, b, eps);
  if (res.status == LpStatus::Optimal) {
    res.x = (res.x.head(n) - res.x.tail(n)).eval();
  }
  return res;
}

}  // namespace pacabs
