#include "pacabs/models.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace pacabs {

void ProblemSpec::validate() const {
  if (system.n() == 0) throw std::invalid_argument("problem has no system");
  if (group < 1) throw std::invalid_argument("group factor must be at least 1");
  if (partition.dim() != system.n()) throw std::invalid_argument("partition and system dimensions differ");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
  if (!(gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
  if (N0 == 0 || Nmax < N0) throw std::invalid_argument("need 0 < N0 <= Nmax");
  if (x0.size() != system.n()) throw std::invalid_argument("x0 has the wrong dimension");
  if (partition.locate(x0).is_absorbing()) throw std::invalid_argument("x0 lies outside the partitioned domain");
  if (alpha.has_value() == beta.has_value()) throw std::invalid_argument("give exactly one of alpha and beta");
  const double c = alpha ? *alpha : *beta;
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("confidence parameter must lie in (0, 1)");
  if (horizon.is_finite() && *horizon.steps < 1) throw std::invalid_argument("horizon must be at least 1");
  if (rho < 0) throw std::invalid_argument("rho must be nonnegative");
  if (rho > 0 && !horizon.is_finite()) throw std::invalid_argument("aggregation needs a finite horizon");
  if (input_slack < 0) throw std::invalid_argument("input slack must be nonnegative");
}

ConfidenceMode ProblemSpec::mode() const {
  if (rho > 0) return ConfidenceMode::Aggregated;
  return symmetric ? ConfidenceMode::Symmetric : ConfidenceMode::Generic;
}

namespace {

ConfidenceReport report_for(const ProblemSpec& s, double b) {
  const std::size_t acts = s.partition.num_cells();
  switch (s.mode()) {
    case ConfidenceMode::Aggregated: return aggregated_confidence(b, s.rho, *s.horizon.steps, acts);
    case ConfidenceMode::Symmetric: return symmetric_confidence(b, s.partition.counts(), acts);
    case ConfidenceMode::Generic: break;
  }
  return generic_confidence(b, acts, s.partition.num_cells() + 1);
}

}  // namespace

double ProblemSpec::per_interval_beta() const {
  if (beta) return *beta;
  if (!alpha) throw std::invalid_argument("problem has neither alpha nor beta");
  return *alpha / report_for(*this, 1.0).unique_interval_count;
}

ConfidenceReport ProblemSpec::confidence() const { return report_for(*this, per_interval_beta()); }

std::vector<std::size_t> cells_in_index_box(const Partition& part, const std::vector<int>& lo,
                                            const std::vector<int>& hi) {
  const auto n = static_cast<std::size_t>(part.dim());
  if (lo.size() != n || hi.size() != n) throw std::invalid_argument("index box has the wrong dimension");
  for (std::size_t i = 0; i < n; ++i) {
    if (lo[i] < 0 || hi[i] >= part.counts()[i] || lo[i] > hi[i]) {
      throw std::invalid_argument("index box outside the grid");
    }
  }
  std::vector<std::size_t> out;
  MultiIndex idx(lo.begin(), lo.end());
  while (true) {
    out.push_back(part.flat_index(idx));
    std::size_t d = n;
    while (d > 0) {
      --d;
      if (++idx[d] <= hi[d]) break;
      idx[d] = lo[d];
      if (d == 0) return out;
    }
    if (n == 0) return out;
  }
}

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

Matrix diag(std::initializer_list<double> v) { return vec(v).asDiagonal(); }

Box box(std::initializer_list<double> lo, std::initializer_list<double> hi) { return Box(vec(lo), vec(hi)); }

void mark(Partition& part, const std::vector<std::pair<std::vector<int>, std::vector<int>>>& goal,
          const std::vector<std::pair<std::vector<int>, std::vector<int>>>& critical) {
  std::vector<std::size_t> g, c;
  for (const auto& [lo, hi] : goal) {
    auto v = cells_in_index_box(part, lo, hi);
    g.insert(g.end(), v.begin(), v.end());
  }
  for (const auto& [lo, hi] : critical) {
    auto v = cells_in_index_box(part, lo, hi);
    c.insert(c.end(), v.begin(), v.end());
  }
  part.set_goal(g);
  part.set_critical(c);
}

// 1-zone building: zone and radiator temperature, two inputs.
ProblemSpec bas1(bool desk) {
  ProblemSpec s;
  s.name = desk ? "bas1-desk" : "bas1";
  Matrix A(2, 2);
  A << 0.8820, 0.0058, 0.0134, 0.9625;
  s.system = LinearSystem(A, diag({0.0584, 0.0241}), vec({0.9604, 1.3269}), box({14, -10}, {28, 10}));
  s.group = 1;
  s.partition = Partition(vec({19.1, 36.0}), vec({0.2, 0.2}), {19, 20});
  mark(s.partition, {{{9, 0}, {9, 19}}}, {});
  // Absolute input slack of the enabled-action test; see README.
  s.input_slack = 0.0125;
  s.horizon = Horizon::finite(desk ? 16 : 64);
  s.eta = 0.5;
  s.x0 = vec({20.0, 37.1});
  s.beta = 0.01;
  s.N0 = 25;
  s.gamma = 2.0;
  s.Nmax = desk ? 800 : 12800;
  s.noise = GaussianNoise{Vector::Zero(2), diag({0.02, 0.1})};
  return s;
}

// 2-zone building: two zone and two radiator temperatures.
ProblemSpec bas2(bool desk) {
  ProblemSpec s;
  s.name = desk ? "bas2-desk" : "bas2";
  Matrix A(4, 4);
  A << 0.8425, 0.0537, -0.0084, 0.0000,
       0.0515, 0.8435, 0.0000, -0.0064,
       0.0668, 0.0000, 0.8971, 0.0000,
       0.0000, 0.0668, 0.0000, 0.8971;
  s.system = LinearSystem(A, diag({0.0584, 0.0599, 0.0362, 0.0362}), vec({1.2291, 1.0749, 0, 0}),
                          box({14, 14, 65, 65}, {26, 26, 85, 85}));
  s.group = 1;
  if (desk) {
    s.partition = Partition(vec({19.3, 19.3, 35.75, 35.75}), vec({0.2, 0.2, 1.5, 1.5}), {7, 7, 3, 3});
    mark(s.partition, {{{3, 3, 0, 0}, {3, 3, 2, 2}}}, {});
    s.x0 = vec({19.4, 19.4, 38.0, 38.0});
    s.horizon = Horizon::finite(16);
    s.Nmax = 800;
  } else {
    s.partition = Partition(vec({17.9, 17.9, 35.75, 35.75}), vec({0.2, 0.2, 0.5, 0.5}), {21, 21, 9, 9});
    mark(s.partition, {{{10, 10, 0, 0}, {10, 10, 8, 8}}}, {});
    s.x0 = vec({19.6, 19.6, 38.0, 38.0});
    s.horizon = Horizon::finite(32);
    s.Nmax = 6400;
  }
  s.eta = 0.5;
  s.beta = 0.01;
  s.N0 = 25;
  s.noise = GaussianNoise{Vector::Zero(4), 0.01 * Matrix::Identity(4, 4)};
  return s;
}

// Three decoupled double integrators, state (px, vx, py, vy, pz, vz).
ProblemSpec uav(bool desk) {
  ProblemSpec s;
  s.name = desk ? "uav-desk" : "uav";
  Matrix A = Matrix::Zero(6, 6);
  Matrix B = Matrix::Zero(6, 3);
  for (int i = 0; i < 3; ++i) {
    A(2 * i, 2 * i) = 1;
    A(2 * i, 2 * i + 1) = 1;
    A(2 * i + 1, 2 * i + 1) = 1;
    B(2 * i, i) = 0.5;
    B(2 * i + 1, i) = 1;
  }
  s.system = LinearSystem(A, B, Vector::Zero(6), box({-4, -4, -4}, {4, 4, 4}));
  s.group = 2;
  // The obstacle layout is illustrative; only the goal box is fixed.
  if (desk) {
    s.partition = Partition(vec({-13, -3, -11, -3, -7, -3}), vec({4, 2, 4, 2, 4, 2}), {7, 3, 5, 3, 3, 3});
    mark(s.partition, {{{6, 0, 3, 0, 0, 0}, {6, 2, 3, 2, 0, 2}}}, {{{3, 0, 0, 0, 0, 0}, {3, 2, 3, 2, 2, 2}}});
    s.x0 = vec({-11, 0, -9, 0, 3, 0});
    s.horizon = Horizon::finite(12);
    s.Nmax = 1600;
  } else {
    s.partition = Partition(vec({-15, -3, -9, -3, -7, -3}), vec({2, 2, 2, 2, 2, 2}), {15, 3, 9, 3, 7, 3});
    mark(s.partition, {{{13, 0, 5, 0, 0, 0}, {14, 2, 6, 2, 1, 2}}},
         {{{5, 0, 0, 0, 0, 0}, {6, 2, 4, 2, 5, 2}}, {{9, 0, 4, 0, 0, 0}, {10, 2, 8, 2, 3, 2}}});
    s.x0 = vec({-14, 0, -8, 0, 6, 0});
    s.horizon = Horizon::finite(32);
    s.Nmax = 12800;
  }
  s.eta = 0.75;
  s.beta = 0.01;
  s.N0 = 25;
  // Skewed two-component mixture standing in for gust turbulence.
  GaussianNoise calm{Vector::Zero(6), diag({0.05, 0.01, 0.05, 0.01, 0.05, 0.01})};
  GaussianNoise gust{vec({0.3, 0.1, 0.3, 0.1, 0.0, 0.0}), diag({0.3, 0.05, 0.3, 0.05, 0.1, 0.02})};
  s.noise = MixtureNoise{{0.85, 0.15}, {calm, gust}};
  return s;
}

// Relative orbital motion (Hill frame), state (x, y, z, vx, vy, vz).
ProblemSpec satellite(bool desk) {
  ProblemSpec s;
  s.name = desk ? "satellite-desk" : "satellite";
  const double n = 0.00113;
  const double tau = 30.0;
  const double c = std::cos(n * tau), sn = std::sin(n * tau), nt = n * tau;
  Matrix A(6, 6);
  A << 4 - 3 * c, 0, 0, sn / n, 2 / n * (1 - c), 0,
       6 * (sn - nt), 1, 0, -2 / n * (1 - c), 4 / n * sn - 3 * nt, 0,
       0, 0, c, 0, 0, sn / n,
       3 * n * sn, 0, 0, c, 2 * sn, 0,
       -6 * n * (1 - c), 0, 0, -2 * sn, 4 * c - 3, 0,
       0, 0, -n * sn, 0, 0, c;
  Matrix B(6, 3);
  B << sn / n, 2 / n * (1 - c), 0,
       -2 / n * (1 - c), 1 / n * (4 * sn - 3 * nt), 0,
       0, 0, sn / n,
       c, 2 * sn, 0,
       -2 * sn, 4 * c - 3, 0,
       0, 0, c;
  s.system = LinearSystem(A, B, Vector::Zero(6), box({-2, -2, -2}, {2, 2, 2}));
  s.group = 2;
  // Grid extents are illustrative; only the per-dimension counts are fixed.
  if (desk) {
    s.partition = Partition(vec({-1.5, -2, -1.5, -0.15, -0.15, -0.15}), vec({1, 4, 3, 0.1, 0.1, 0.3}),
                            {3, 6, 1, 3, 3, 1});
    mark(s.partition, {{{1, 0, 0, 0, 0, 0}, {1, 0, 0, 2, 2, 0}}}, {{{1, 2, 0, 0, 0, 0}, {1, 2, 0, 2, 2, 0}}});
    s.horizon = Horizon::finite(6);
    s.Nmax = 1600;
  } else {
    s.partition = Partition(vec({-1.1, -0.5, -0.5, -0.05, -0.05, -0.05}), vec({0.2, 1, 0.2, 0.02, 0.02, 0.02}),
                            {11, 23, 5, 5, 5, 5});
    mark(s.partition, {{{4, 0, 0, 0, 0, 0}, {6, 0, 4, 4, 4, 4}}}, {{{4, 10, 0, 0, 0, 0}, {6, 12, 4, 4, 4, 4}}});
    s.horizon = Horizon::finite(8);
    s.Nmax = 12800;
  }
  s.x0 = vec({0, 20, 0, 0, 0, 0});
  s.eta = 0.5;
  s.alpha = 0.05;
  s.symmetric = true;
  s.N0 = 25;
  s.noise = GaussianNoise{Vector::Zero(6), diag({0.1, 0.1, 0.01, 0.01, 0.01, 0.01})};
  return s;
}

// Planar double integrator (position, velocity) grouped over two steps.
ProblemSpec double_integrator() {
  ProblemSpec s;
  s.name = "double-integrator";
  Matrix A(2, 2);
  A << 1, 1, 0, 1;
  Matrix B(2, 1);
  B << 0.5, 1;
  s.system = LinearSystem(A, B, Vector::Zero(2), box({-4}, {4}));
  s.group = 2;
  s.partition = Partition(vec({-11, -5.5}), vec({2, 1}), {11, 11});
  mark(s.partition, {{{5, 4}, {5, 6}}}, {{{7, 6}, {7, 10}}});
  s.x0 = vec({-8, 0});
  s.horizon = Horizon::finite(8);
  s.eta = 0.5;
  s.alpha = 0.05;
  s.symmetric = true;
  s.N0 = 100;
  s.Nmax = 1600;
  s.noise = GaussianNoise{Vector::Zero(2), diag({0.4, 0.15})};
  return s;
}

const std::map<std::string, std::function<ProblemSpec()>>& registry() {
  static const std::map<std::string, std::function<ProblemSpec()>> r = {
      {"bas1", [] { return bas1(false); }},
      {"bas1-desk", [] { return bas1(true); }},
      {"bas2", [] { return bas2(false); }},
      {"bas2-desk", [] { return bas2(true); }},
      {"uav", [] { return uav(false); }},
      {"uav-desk", [] { return uav(true); }},
      {"satellite", [] { return satellite(false); }},
      {"satellite-desk", [] { return satellite(true); }},
      {"double-integrator", [] { return double_integrator(); }},
      {"double-integrator-desk", [] {
         auto s = double_integrator();
         s.name = "double-integrator-desk";
         return s;
       }},
  };
  return r;
}

}  // namespace

std::vector<std::string> builtin_model_names() {
  std::vector<std::string> out;
  for (const auto& [k, _] : registry()) out.push_back(k);
  return out;
}

ProblemSpec builtin_model(const std::string& name) {
  const auto& r = registry();
  auto it = r.find(name);
  if (it == r.end()) throw std::invalid_argument("unknown model: " + name);
  return it->second();
}

}  // namespace pacabs
