#include "pacabs/linsys.hpp"

#include <doctest.h>

#include <random>

using namespace pacabs;

namespace {

Matrix mat(int r, int c, std::initializer_list<double> v) {
  Matrix M(r, c);
  auto it = v.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = *it++;
  return M;
}

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

Box unit_box(int p, double r = 1.0) { return Box(Vector::Constant(p, -r), Vector::Constant(p, r)); }

LinearSystem double_integrator() {
  return LinearSystem(mat(2, 2, {1, 1, 0, 1}), mat(2, 1, {0.5, 1}), Vector::Zero(2), unit_box(1, 4));
}

Matrix random_matrix(std::mt19937_64& g, int r, int c) {
  std::normal_distribution<double> nd;
  Matrix M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = nd(g);
  return M;
}

}  // namespace

TEST_CASE("system construction validates dimensions") {
  CHECK_THROWS_AS(LinearSystem(Matrix::Identity(2, 3), Matrix::Identity(2, 2), Vector::Zero(2), unit_box(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(LinearSystem(Matrix::Identity(2, 2), Matrix::Identity(3, 2), Vector::Zero(2), unit_box(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(Box(vec({1.0}), vec({0.0})), std::invalid_argument);
  CHECK_THROWS_AS(group_steps(double_integrator(), 0), std::invalid_argument);
}

TEST_CASE("controllability") {
  CHECK(is_controllable(double_integrator()));
  CHECK_FALSE(is_controllable(LinearSystem(Matrix::Identity(2, 2), mat(2, 1, {1, 0}), Vector::Zero(2), unit_box(1))));
  CHECK(is_controllable(LinearSystem(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2), unit_box(2))));
}

TEST_CASE("grouping the double integrator over two steps") {
  const GroupedSystem g = group_steps(double_integrator(), 2);
  CHECK(g.A().isApprox(mat(2, 2, {1, 2, 0, 1})));
  // [A B, B] with A B = (1.5, 1).
  CHECK(g.B().isApprox(mat(2, 2, {1.5, 0.5, 1, 1})));
  CHECK(g.full_row_rank());
  CHECK(g.input_box().lower.isApprox(Vector::Constant(2, -4)));

  const GroupedSystem g1 = group_steps(double_integrator(), 1);
  CHECK_FALSE(g1.full_row_rank());
  CHECK_THROWS_AS(control_input(g1, Vector::Zero(2), vec({1, 0})), RankDeficientError);
}

TEST_CASE("grouping with unit factor leaves the system unchanged") {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 20; ++t) {
    LinearSystem s(random_matrix(gen, 3, 3), random_matrix(gen, 3, 2), random_matrix(gen, 3, 1), unit_box(2));
    const GroupedSystem g = group_steps(s, 1);
    CHECK(g.A() == s.A());
    CHECK(g.B() == s.B());
    CHECK(g.q() == s.q());
  }
}

TEST_CASE("drift accumulates geometrically") {
  LinearSystem s(Matrix::Identity(2, 2), Matrix::Identity(2, 2), vec({1, 1}), unit_box(2));
  CHECK(group_steps(s, 2).q().isApprox(vec({2, 2})));
  LinearSystem s2(2 * Matrix::Identity(2, 2), Matrix::Identity(2, 2), vec({1, 0}), unit_box(2));
  CHECK(group_steps(s2, 3).q().isApprox(vec({7, 0})));  // 1 + 2 + 4
}

TEST_CASE("control input examples") {
  LinearSystem id(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2), unit_box(2));
  const GroupedSystem gi = group_steps(id, 1);
  CHECK(control_input(gi, vec({1, 1}), vec({2, 0})).isApprox(vec({1, -1})));

  const GroupedSystem g = group_steps(double_integrator(), 2);
  CHECK(control_input(g, Vector::Zero(2), vec({1, 0})).isApprox(vec({1, -1})));
  const Vector x = vec({0.3, -0.7});
  CHECK(control_input(g, x, g.A() * x + g.q()).norm() < 1e-12);
}

TEST_CASE("successor examples") {
  LinearSystem id(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2), unit_box(2));
  const GroupedSystem gi = group_steps(id, 1);
  CHECK(successor(gi, Vector::Zero(2), Vector::Zero(2), vec({0.3, -0.1})).isApprox(vec({0.3, -0.1})));

  const GroupedSystem g = group_steps(double_integrator(), 2);
  CHECK(successor(g, Vector::Zero(2), vec({2, -2}), vec({0.1, 0.1})).isApprox(vec({2.1, 0.1})));
}

TEST_CASE("grouped noise combination") {
  const GroupedSystem g = group_steps(double_integrator(), 2);
  // Oldest first: A w_k + w_{k+1}.
  const Vector w = g.combine_noise({vec({0, 1}), vec({0.5, 0})});
  CHECK(w.isApprox(vec({1.5, 1})));
}

TEST_CASE("property: control round trip lands on the target") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> dim(1, 4);
  std::normal_distribution<double> nd;
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    const int n = dim(gen);
    const int p = dim(gen);
    const int grp = 1 + t % 3;
    LinearSystem s(random_matrix(gen, n, n), random_matrix(gen, n, p), random_matrix(gen, n, 1), unit_box(p));
    const GroupedSystem g = group_steps(s, grp);
    if (!g.full_row_rank()) continue;
    const Vector x = random_matrix(gen, n, 1);
    const Vector d = random_matrix(gen, n, 1);
    const Vector u = control_input(g, x, d);
    CHECK((successor(g, x, u, Vector::Zero(n)) - d).cwiseAbs().maxCoeff() < 1e-9 * (1 + d.cwiseAbs().maxCoeff() + x.cwiseAbs().maxCoeff() * g.A().norm()));
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("property: grouping a controllable system yields full row rank") {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 3;
    const int p = 1 + t % 2;
    LinearSystem s(random_matrix(gen, n, n), random_matrix(gen, n, p), Vector::Zero(n), unit_box(p));
    if (!is_controllable(s)) continue;
    const int g = (n + p - 1) / p;
    CHECK(group_steps(s, g).full_row_rank());
  }
}

TEST_CASE("property: successor is affine in the noise") {
  std::mt19937_64 gen(3);
  const GroupedSystem g = group_steps(double_integrator(), 2);
  for (int t = 0; t < 200; ++t) {
    const Vector x = random_matrix(gen, 2, 1), u = random_matrix(gen, 2, 1);
    const Vector w1 = random_matrix(gen, 2, 1), w2 = random_matrix(gen, 2, 1);
    const Vector diff = successor(g, x, u, w1 + w2) - successor(g, x, u, w1);
    CHECK((diff - w2).cwiseAbs().maxCoeff() < 1e-12);
  }
}
