#include "pacabs/imdp.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

using namespace pacabs;

namespace {

using L = StateLabel;

Transition tr(StateId d, double lo, double up) { return {d, ProbInterval(lo, up)}; }

// Brute-force reference for the inner problem: every vertex of the interval
// simplex has at most one coordinate strictly between its bounds.
double vertex_extreme(const IntervalRow& row, const std::vector<double>& values, Sense sense) {
  const std::size_t m = row.size();
  double best = sense == Sense::Min ? 1e300 : -1e300;
  bool found = false;
  for (std::size_t f = 0; f < m; ++f) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << (m - 1)); ++mask) {
      double sum = 0.0, e = 0.0;
      std::size_t bit = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (i == f) continue;
        const double p = (mask >> bit++) & 1 ? row[i].iv.up : row[i].iv.low;
        sum += p;
        e += p * values[row[i].dst];
      }
      const double pf = 1.0 - sum;
      if (pf < row[f].iv.low - 1e-12 || pf > row[f].iv.up + 1e-12) continue;
      e += pf * values[row[f].dst];
      found = true;
      best = sense == Sense::Min ? std::min(best, e) : std::max(best, e);
    }
  }
  REQUIRE(found);
  return best;
}

// Random row around a random distribution over distinct successors < num_states.
IntervalRow random_row(std::mt19937_64& gen, std::size_t num_states, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, std::min(max_len, num_states));
  std::vector<StateId> ids(num_states);
  std::iota(ids.begin(), ids.end(), StateId{0});
  std::shuffle(ids.begin(), ids.end(), gen);
  ids.resize(len(gen));
  std::sort(ids.begin(), ids.end());
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> p(ids.size());
  double tot = 0;
  for (auto& x : p) tot += (x = ex(gen));
  std::uniform_real_distribution<double> u(0.0, 0.3);
  IntervalRow row;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double q = p[i] / tot;
    row.push_back(tr(ids[i], std::max(0.0, q - u(gen)), std::min(1.0, q + u(gen))));
  }
  return row;
}

struct RandomModel {
  std::vector<StateLabel> labels;
  std::vector<std::vector<ActionId>> enabled;
  std::vector<IntervalRow> rows;
  Imdp build() const { return Imdp(labels, 0, enabled, rows); }
};

RandomModel random_model(std::mt19937_64& gen, std::size_t n, std::size_t acts) {
  RandomModel r;
  r.labels.assign(n, L::None);
  r.labels[n - 1] = L::Absorbing;
  r.labels[n - 2] = L::Goal;
  r.labels[n - 3] = L::Critical;
  for (std::size_t a = 0; a < acts; ++a) r.rows.push_back(random_row(gen, n, 5));
  r.enabled.resize(n);
  std::bernoulli_distribution pick(0.4);
  for (std::size_t s = 0; s + 1 < n; ++s)
    for (ActionId a = 0; a < acts; ++a)
      if (pick(gen)) r.enabled[s].push_back(a);
  return r;
}

// Two states: s0 (initial) and goal s1; one action with [0.4,0.6] to each.
Imdp coin_model() {
  return Imdp({L::None, L::Goal}, 0, {{0}, {}}, {{tr(0, 0.4, 0.6), tr(1, 0.4, 0.6)}});
}

// s1 goal, s2, s3, s4 critical (ids 0..3).
Imdp aggregation_toy() {
  std::vector<IntervalRow> rows = {
      {tr(0, 0.92, 0.96), tr(2, 0.04, 0.08)},
      {tr(0, 0.80, 0.85), tr(1, 0.15, 0.20)},
      {tr(2, 0.3, 0.7), tr(3, 0.3, 0.7)},
  };
  return Imdp({L::Goal, L::None, L::None, L::Critical}, 1, {{}, {0}, {1}, {2}}, rows);
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("model construction rejects rows without a distribution") {
  CHECK_THROWS_AS(Imdp({L::None, L::Goal}, 0, {{0}, {}}, {{tr(0, 0.6, 0.7), tr(1, 0.6, 0.7)}}), std::invalid_argument);
  CHECK_THROWS_AS(Imdp({L::None, L::Goal}, 0, {{0}, {}}, {{tr(0, 0.1, 0.2), tr(1, 0.1, 0.2)}}), std::invalid_argument);
  CHECK_THROWS(Imdp({L::None}, 3, {{}}, {}));
  CHECK_THROWS(Imdp({L::None}, 0, {{1}}, {{tr(0, 1, 1)}}));
  const Imdp m = coin_model();
  CHECK(m.num_choices() == 1);
  CHECK(m.num_transitions() == 2);
}

TEST_CASE("inner problem examples") {
  const std::vector<double> v1 = {0.7};
  const auto single = inner_extreme(IntervalRow{tr(0, 0.3, 1.0)}, v1, Sense::Min);
  CHECK(single.witness[0] == doctest::Approx(1.0));
  CHECK(single.expectation == doctest::Approx(0.7));

  const IntervalRow row = {tr(0, 0.1, 0.6), tr(1, 0.2, 0.5), tr(2, 0.3, 0.6)};
  const std::vector<double> v = {0.0, 0.5, 1.0};
  const auto mn = inner_extreme(row, v, Sense::Min);
  CHECK(mn.expectation == doctest::Approx(0.4));
  CHECK(mn.witness[0] == doctest::Approx(0.5));
  CHECK(mn.witness[1] == doctest::Approx(0.2));
  CHECK(mn.witness[2] == doctest::Approx(0.3));
  const auto mx = inner_extreme(row, v, Sense::Max);
  CHECK(mx.expectation == doctest::Approx(0.75));
  CHECK(mx.witness[0] == doctest::Approx(0.1));
  CHECK(mx.witness[1] == doctest::Approx(0.3));
  CHECK(mx.witness[2] == doctest::Approx(0.6));
}

TEST_CASE("inner problem ties fill the lower state id first") {
  const IntervalRow row = {tr(3, 0.0, 1.0), tr(5, 0.0, 1.0)};
  const std::vector<double> v = {0, 0, 0, 0.5, 0, 0.5};
  const auto r = inner_extreme(row, v, Sense::Min);
  CHECK(r.witness[0] == 1.0);
  CHECK(r.witness[1] == 0.0);
}

TEST_CASE("property: inner problem matches vertex enumeration") {
  std::mt19937_64 gen(71);
  std::uniform_real_distribution<double> u(0, 1);
  std::bernoulli_distribution tie(0.2);
  for (int t = 0; t < 10000; ++t) {
    const IntervalRow row = random_row(gen, 12, 8);
    std::vector<double> v(12);
    for (auto& x : v) x = tie(gen) ? 0.5 : u(gen);
    for (Sense s : {Sense::Min, Sense::Max}) {
      const auto r = inner_extreme(row, v, s);
      CHECK(std::abs(r.expectation - vertex_extreme(row, v, s)) < 1e-9);
      double sum = 0;
      for (std::size_t i = 0; i < row.size(); ++i) {
        CHECK(r.witness[i] >= row[i].iv.low);
        CHECK(r.witness[i] <= row[i].iv.up);
        sum += r.witness[i];
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("value iteration examples") {
  const Imdp m = coin_model();
  CHECK(robust_value_iteration(m, Horizon::finite(1), Bound::Lower).values[0] == doctest::Approx(0.4));
  CHECK(robust_value_iteration(m, Horizon::finite(1), Bound::Upper).values[0] == doctest::Approx(0.6));
  CHECK(robust_value_iteration(m, Horizon::finite(2), Bound::Lower).values[0] == doctest::Approx(0.64));
  const Solution inf = robust_value_iteration(m, Horizon::infinite(), Bound::Lower);
  CHECK(inf.values[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(inf.policy.stationary());
  CHECK(inf.policy.action(0, 0) == 0);

  const Imdp all_goal({L::Goal, L::Goal}, 0, {{}, {}}, {});
  for (int K : {0, 1, 5}) {
    const auto v = robust_value_iteration(all_goal, Horizon::finite(K), Bound::Lower).values;
    CHECK(v[0] == 1.0);
    CHECK(v[1] == 1.0);
  }
}

TEST_CASE("policy slices and terminal values") {
  const Imdp m = coin_model();
  const Solution s = robust_value_iteration(m, Horizon::finite(3), Bound::Lower);
  CHECK(s.policy.horizon() == 3);
  REQUIRE(s.per_step.size() == 4);
  CHECK(s.per_step[3][0] == 0.0);
  CHECK(s.per_step[3][1] == 1.0);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(s.policy.action(0, k) == 0);
    CHECK(s.policy.action(1, k) == kNoAction);
  }
}

TEST_CASE("argmax ties go to the lowest action id") {
  const IntervalRow r = {tr(1, 0.5, 0.5), tr(2, 0.5, 0.5)};
  const Imdp m({L::None, L::Goal, L::None}, 0, {{2, 1, 0}, {}, {}}, {r, r, r});
  const Solution s = robust_value_iteration(m, Horizon::finite(1), Bound::Lower);
  CHECK(s.policy.action(0, 0) == 0);
}

TEST_CASE("property: values are monotone in the horizon and bounds are ordered") {
  std::mt19937_64 gen(73);
  for (int t = 0; t < 100; ++t) {
    const Imdp m = random_model(gen, 10, 6).build();
    ValueVector prev(m.num_states(), 0.0);
    for (int K = 0; K <= 8; ++K) {
      const auto lo = robust_value_iteration(m, Horizon::finite(K), Bound::Lower);
      const auto up = robust_value_iteration(m, Horizon::finite(K), Bound::Upper);
      for (StateId s = 0; s < m.num_states(); ++s) {
        CHECK(lo.values[s] >= prev[s] - 1e-12);
        CHECK(lo.values[s] <= up.values[s] + 1e-12);
        if (m.is_goal(s)) CHECK(lo.values[s] == 1.0);
        if (m.is_losing(s)) CHECK(up.values[s] == 0.0);
        const auto a = lo.policy.action(s, 0);
        if (K > 0 && a != kNoAction) {
          const auto& en = m.enabled(s);
          CHECK(std::find(en.begin(), en.end(), static_cast<ActionId>(a)) != en.end());
        }
      }
      prev = lo.values;
    }
  }
}

TEST_CASE("property: widening intervals never raises the lower bound") {
  std::mt19937_64 gen(79);
  std::uniform_real_distribution<double> u(0, 0.1);
  for (int t = 0; t < 100; ++t) {
    RandomModel r = random_model(gen, 9, 5);
    const Imdp tight = r.build();
    for (auto& row : r.rows)
      for (auto& x : row) x.iv = ProbInterval(std::max(0.0, x.iv.low - u(gen)), std::min(1.0, x.iv.up + u(gen)));
    const Imdp wide = r.build();
    const auto a = robust_value_iteration(tight, Horizon::finite(6), Bound::Lower).values;
    const auto b = robust_value_iteration(wide, Horizon::finite(6), Bound::Lower).values;
    for (std::size_t s = 0; s < a.size(); ++s) CHECK(b[s] <= a[s] + 1e-12);
  }
}

TEST_CASE("aggregation bins on the toy model") {
  Imdp m = aggregation_toy();
  m.beta = 1e-3;
  CHECK(value_bin(1.0, 10) == 9);
  CHECK(value_bin(0.0, 10) == 0);
  CHECK(value_bin(0.92, 10) == 9);
  CHECK(value_bin(0.80, 10) == 8);

  const AggregatedSolution res = improved_synthesis(m, 2, 10);
  // k = K: goal alone at value 1, everything else 0.
  CHECK(res.solution.per_step[2] == ValueVector{1, 0, 0, 0});
  // k = K - 1: bins {s1, s2} -> 0.92, {s3} -> 0.80, {s4} -> 0.
  const ValueVector& v1 = res.solution.per_step[1];
  CHECK(v1[1] == doctest::Approx(0.92));
  CHECK(v1[2] == doctest::Approx(0.80));
  CHECK(v1[3] == 0.0);
  CHECK(value_bin(v1[0], 10) == value_bin(v1[1], 10));
  // k = K - 2, from hand-merged rows.
  CHECK(res.solution.values[1] == doctest::Approx(0.92 * 0.92 + 0.08 * 0.80));
  CHECK(res.solution.values[2] == doctest::Approx(0.92));
  const auto plain = robust_value_iteration(m, Horizon::finite(2), Bound::Lower).values;
  CHECK(plain[1] == doctest::Approx(0.92 + 0.08 * 0.80));
  CHECK(plain[2] == doctest::Approx(0.80 + 0.20 * 0.92));
  CHECK(res.confidence.alpha == doctest::Approx(m.beta * 10 * 2 * 3));
}

TEST_CASE("aggregation with zero horizon") {
  const Imdp m = aggregation_toy();
  const auto res = improved_synthesis(m, 0, 4);
  CHECK(res.solution.values == ValueVector{1, 0, 0, 0});
  CHECK(res.solution.policy.horizon() == 0);
}

TEST_CASE("property: aggregation is sound and lossless with enough bins") {
  std::mt19937_64 gen(83);
  for (int t = 0; t < 60; ++t) {
    const Imdp m = random_model(gen, 12, 8).build();
    const int K = 5;
    const auto plain = robust_value_iteration(m, Horizon::finite(K), Bound::Lower);
    for (int rho : {2, 10, 100}) {
      const auto agg = improved_synthesis(m, K, rho).solution;
      for (int k = 0; k <= K; ++k)
        for (StateId s = 0; s < m.num_states(); ++s) CHECK(agg.per_step[k][s] <= plain.per_step[k][s] + 1e-12);
    }
    // One backup over singleton bins equals the plain backup.
    for (int k = 1; k <= K; ++k) {
      const ValueVector& next = plain.per_step[k];
      std::vector<int> bins;
      bool singleton = true;
      const int rho = 1000000;
      std::vector<double> sorted = next;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
        if (value_bin(sorted[i], rho) == value_bin(sorted[i + 1], rho)) singleton = false;
      if (!singleton) continue;
      const auto step = aggregate_backup(m, next, rho);
      for (StateId s = 0; s < m.num_states(); ++s) CHECK(step.values[s] == doctest::Approx(plain.per_step[k - 1][s]).epsilon(1e-12));
    }
  }
}

TEST_CASE("explicit export golden file and round trip") {
  const Imdp m({L::None, L::Goal}, 0, {{0, 1}, {1}}, {{tr(0, 0.2, 0.5), tr(1, 0.5, 0.8)}, {tr(1, 1, 1)}});
  const auto dir = std::filesystem::temp_directory_path() / "pacabs_export_test";
  std::filesystem::create_directories(dir);
  const auto sta = (dir / "m.sta").string(), tra = (dir / "m.tra").string();
  export_explicit(m, sta, tra);
  CHECK(slurp(sta) == "0 init\n1 goal\n");
  CHECK(slurp(tra) == "0 0 0 0.2 0.5\n0 0 1 0.5 0.8\n0 1 1 1 1\n1 1 1 1 1\n");

  const Imdp back = parse_explicit(sta, tra);
  const auto sta2 = (dir / "b.sta").string(), tra2 = (dir / "b.tra").string();
  export_explicit(back, sta2, tra2);
  CHECK(slurp(sta) == slurp(sta2));
  CHECK(slurp(tra) == slurp(tra2));
  std::filesystem::remove_all(dir);
}

TEST_CASE("export of a shared row is identical for every state enabling it") {
  std::mt19937_64 gen(89);
  const Imdp m = random_model(gen, 8, 3).build();
  const auto dir = std::filesystem::temp_directory_path() / "pacabs_shared_test";
  std::filesystem::create_directories(dir);
  export_explicit(m, (dir / "m.sta").string(), (dir / "m.tra").string());
  std::ifstream in(dir / "m.tra");
  std::map<ActionId, std::map<StateId, std::string>> by;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    StateId s;
    ActionId a;
    ls >> s >> a;
    std::string rest;
    std::getline(ls, rest);
    by[a][s] += rest + "\n";
  }
  for (const auto& [a, per_state] : by)
    for (const auto& [s, text] : per_state) CHECK(text == per_state.begin()->second);
  std::filesystem::remove_all(dir);
}

TEST_CASE("parse rejects inconsistent rows and unknown labels") {
  const auto dir = std::filesystem::temp_directory_path() / "pacabs_parse_test";
  std::filesystem::create_directories(dir);
  const auto sta = (dir / "m.sta").string(), tra = (dir / "m.tra").string();
  std::ofstream(sta) << "0 init\n1 goal\n2 none\n";
  std::ofstream(tra) << "0 0 1 1 1\n2 0 0 1 1\n";
  CHECK_THROWS(parse_explicit(sta, tra));
  std::ofstream(sta) << "0 init\n1 bogus\n";
  std::ofstream(tra) << "";
  CHECK_THROWS(parse_explicit(sta, tra));
  CHECK_THROWS(parse_explicit((dir / "missing").string(), tra));
  std::filesystem::remove_all(dir);
}
