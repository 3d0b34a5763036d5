#include "pacabs/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pacabs;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

Box box(std::initializer_list<double> lo, std::initializer_list<double> hi) { return Box(vec(lo), vec(hi)); }

GroupedSystem simple(double a, Vector q, double ubound = 1.0) {
  return group_steps(LinearSystem(a * Matrix::Identity(2, 2), Matrix::Identity(2, 2), std::move(q),
                                  Box(Vector::Constant(2, -ubound), Vector::Constant(2, ubound))),
                     1);
}

// Box test through sampled points on and just beyond the box faces.
void check_region_is_box(const Region& r, const Box& b) {
  const Vector c = b.center();
  for (Eigen::Index i = 0; i < b.dim(); ++i) {
    for (double s : {-1.0, 1.0}) {
      Vector x = c;
      x(i) = s > 0 ? b.upper(i) : b.lower(i);
      CHECK(r.contains(x));
      x(i) += s * 1e-6;
      CHECK_FALSE(r.contains(x));
    }
  }
  CHECK(r.contains(b.lower));
  CHECK(r.contains(b.upper));
}

}  // namespace

TEST_CASE("locate on a 1-D partition") {
  Partition p(vec({-1}), vec({1}), {2});
  CHECK(p.locate(vec({-0.5})) == RegionId::cell(0));
  CHECK(p.locate(vec({1.5})).is_absorbing());
  CHECK(p.locate(vec({0.0})) == RegionId::cell(1));
  CHECK(p.locate(vec({1.0})) == RegionId::cell(1));  // last cell is closed
  CHECK(p.locate(vec({-1.0})) == RegionId::cell(0));
  CHECK(p.locate(vec({-1.0000001})).is_absorbing());
}

TEST_CASE("cell regions and centres") {
  Partition p1(vec({0}), vec({2}), {1});
  CHECK(p1.cell_center(0)(0) == doctest::Approx(1.0));
  check_region_is_box(p1.cell_region(0), box({0}, {2}));

  Partition p2(vec({0, 0}), vec({1, 1}), {2, 2});
  CHECK(p2.cell_center(p2.flat_index({1, 1})).isApprox(vec({1.5, 1.5})));

  Partition bas(vec({19.1, 36.0}), vec({0.2, 0.2}), {19, 20});
  CHECK(bas.cell_center(bas.flat_index({9, 10})).isApprox(vec({21.0, 38.1})));
  CHECK(bas.num_cells() == 380);
}

TEST_CASE("flat and multi indices are inverse and row-major") {
  Partition p(vec({0, 0, 0}), vec({1, 1, 1}), {3, 4, 5});
  CHECK(p.flat_index({0, 0, 1}) == 1);
  CHECK(p.flat_index({0, 1, 0}) == 5);
  CHECK(p.flat_index({1, 0, 0}) == 20);
  for (std::size_t f = 0; f < p.num_cells(); ++f) CHECK(p.flat_index(p.multi_index(f)) == f);
}

TEST_CASE("goal and critical cells") {
  Partition p(vec({0, 0}), vec({1, 1}), {3, 3});
  const auto cells = p.cells_covering(box({1, 0}, {3, 1}));
  CHECK(cells.size() == 2);
  CHECK_THROWS(p.cells_covering(box({0.5, 0}, {1, 1})));
  p.set_goal(cells);
  CHECK(p.is_goal(p.flat_index({1, 0})));
  CHECK_THROWS(p.set_critical({p.flat_index({1, 0})}));
  p.set_critical({0});
  CHECK(p.critical_cells() == std::vector<std::size_t>{0});
}

TEST_CASE("chebyshev centres") {
  CHECK(chebyshev_center(Region::from_box(box({-1, -1}, {1, 1}))).norm() < 1e-9);

  const Vector c = chebyshev_center(Region::from_box(box({0, 0}, {4, 2})));
  CHECK(c(1) == doctest::Approx(1.0));
  CHECK(c(0) >= 1.0 - 1e-9);
  CHECK(c(0) <= 3.0 + 1e-9);
  // Deterministic across calls.
  CHECK(chebyshev_center(Region::from_box(box({0, 0}, {4, 2}))) == c);

  Matrix M(3, 2);
  M << -1, 0, 0, -1, 1, 1;
  const Vector t = chebyshev_center(Region{M, vec({0, 0, 2})});
  CHECK(t(0) == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-9));
  CHECK(t(1) == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("polytope scaling") {
  const Region r = Region::from_box(box({-1}, {1}));
  check_region_is_box(scale_polytope(r, vec({0}), 1.2), box({-1.2}, {1.2}));
  const Region same = scale_polytope(r, vec({0.3}), 1.0);
  CHECK(same.M == r.M);
  CHECK(same.b.isApprox(r.b));
  check_region_is_box(scale_polytope(Region::from_box(box({0}, {2})), vec({1}), 0.5), box({0.5}, {1.5}));
}

TEST_CASE("property: scaling is monotone in lambda") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int t = 0; t < 200; ++t) {
    const Box b = box({-u(gen), -u(gen)}, {u(gen), u(gen)});
    const Region r = Region::from_box(b);
    const Vector c = b.center();
    double l1 = u(gen), l2 = u(gen);
    if (l1 > l2) std::swap(l1, l2);
    const Region small = scale_polytope(r, c, l1), big = scale_polytope(r, c, l2);
    // Vertices of the scaled box.
    for (int mask = 0; mask < 4; ++mask) {
      Vector v(2);
      for (int i = 0; i < 2; ++i) v(i) = c(i) + l1 * (((mask >> i) & 1 ? b.upper(i) : b.lower(i)) - c(i));
      CHECK(small.contains(v));
      CHECK(big.contains(v));
    }
  }
}

TEST_CASE("backward reachable sets") {
  check_region_is_box(backward_reachable_set(simple(1, Vector::Zero(2)), Vector::Zero(2)), box({-1, -1}, {1, 1}));
  check_region_is_box(backward_reachable_set(simple(1, vec({1, 0})), vec({1, 0})), box({-1, -1}, {1, 1}));
  check_region_is_box(backward_reachable_set(simple(2, Vector::Zero(2)), Vector::Zero(2)), box({-0.5, -0.5}, {0.5, 0.5}));
}

TEST_CASE("region containment in backward reachable sets") {
  const GroupedSystem g = simple(1, Vector::Zero(2));
  CHECK(region_in_brs(g, box({-0.5, -0.5}, {0.5, 0.5}), Vector::Zero(2)));
  CHECK_FALSE(region_in_brs(g, box({0.5, -0.5}, {1.5, 0.5}), Vector::Zero(2)));
  CHECK(region_in_brs(g, box({0.5, -0.5}, {1.5, 0.5}), Vector::Zero(2), 0.5));

  BrsContainment brs(g);
  CHECK(brs.closed_form());
  CHECK(brs.contains(box({-0.5, -0.5}, {0.5, 0.5}), Vector::Zero(2)));
  CHECK_FALSE(brs.contains(box({0.5, -0.5}, {1.5, 0.5}), Vector::Zero(2)));
}

TEST_CASE("closed-form and per-vertex containment agree") {
  std::mt19937_64 gen(23);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 100; ++t) {
    Matrix A(2, 2), B(2, 2);
    for (int i = 0; i < 4; ++i) {
      A(i / 2, i % 2) = nd(gen);
      B(i / 2, i % 2) = nd(gen);
    }
    const GroupedSystem g = group_steps(LinearSystem(A, B, vec({nd(gen), nd(gen)}), box({-2, -2}, {2, 2})), 1);
    if (!g.full_row_rank()) continue;
    BrsContainment brs(g);
    for (int k = 0; k < 20; ++k) {
      const double x = u(gen), y = u(gen), w = 0.5 * std::abs(u(gen));
      const Box cell = box({x, y}, {x + w, y + w});
      const Vector d = vec({u(gen), u(gen)});
      CHECK(brs.contains(cell, d) == region_in_brs(g, cell, d));
    }
  }
}

TEST_CASE("property: containment implies admissible inputs everywhere in the region") {
  std::mt19937_64 gen(29);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u01(0, 1);
  int positive = 0;
  for (int t = 0; t < 400 && positive < 20; ++t) {
    Matrix A = Matrix::Identity(2, 2), B = Matrix::Identity(2, 2);
    for (int i = 0; i < 4; ++i) {
      A(i / 2, i % 2) += 0.3 * nd(gen);
      B(i / 2, i % 2) += 0.3 * nd(gen);
    }
    const GroupedSystem g = group_steps(LinearSystem(A, B, Vector::Zero(2), box({-1, -1}, {1, 1})), 1);
    const Vector corner = vec({nd(gen) * 0.3, nd(gen) * 0.3});
    const Box c2(corner, corner + Vector::Constant(2, 0.2));
    const Vector d = vec({nd(gen) * 0.3, nd(gen) * 0.3});
    if (!region_in_brs(g, c2, d)) continue;
    ++positive;
    for (int k = 0; k < 1000; ++k) {
      Vector x(2);
      for (int i = 0; i < 2; ++i) x(i) = c2.lower(i) + u01(gen) * (c2.upper(i) - c2.lower(i));
      const Vector uu = control_input(g, x, d);
      CHECK(g.input_box().contains(uu, 1e-9));
      CHECK((successor(g, x, uu, Vector::Zero(2)) - d).norm() < 1e-9);
    }
  }
  CHECK(positive > 0);
}

TEST_CASE("property: locate partitions the domain") {
  std::mt19937_64 gen(31);
  Partition p(vec({-1, 2}), vec({0.5, 0.25}), {4, 6});
  std::uniform_real_distribution<double> ux(-1, 1), uy(2, 3.5);
  for (int t = 0; t < 2000; ++t) {
    const Vector x = vec({ux(gen), uy(gen)});
    const RegionId r = p.locate(x);
    REQUIRE_FALSE(r.is_absorbing());
    int hits = 0;
    for (std::size_t c = 0; c < p.num_cells(); ++c) {
      const Box b = p.cell_box(c);
      const bool in = b.contains(x);
      if (in) ++hits;
    }
    CHECK(hits >= 1);  // closed boxes overlap only on measure-zero faces
    CHECK(p.cell_box(r.flat()).contains(x));
  }
  double vol = 0;
  for (std::size_t c = 0; c < p.num_cells(); ++c) vol += (p.cell_box(c).upper - p.cell_box(c).lower).prod();
  const Box dom = p.domain();
  CHECK(vol == doctest::Approx((dom.upper - dom.lower).prod()));
}
