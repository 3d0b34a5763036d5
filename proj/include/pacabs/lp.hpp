#pragma once

#include "pacabs/linsys.hpp"

namespace pacabs {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  Vector x;
};

/// Dense two-phase simplex for: maximize c'x subject to A x <= b, x >= 0.
///
/// Bland's rule is used for both entering and leaving variables, so the pivot
/// sequence (and therefore the returned optimum among ties) is deterministic.
/// Intended for the small programs that arise here (a few dozen variables).
LpResult solve_lp(const Vector& c, const Matrix& A, const Vector& b, double eps = 1e-11);

/// Same program with free (sign-unrestricted) variables.
LpResult solve_lp_free(const Vector& c, const Matrix& A, const Vector& b, double eps = 1e-11);

}  // namespace pacabs
