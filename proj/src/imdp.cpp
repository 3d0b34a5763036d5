#include "pacabs/imdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pacabs {

// ---------------------------------------------------------------------------
// Confidence bookkeeping

ConfidenceReport generic_confidence(double beta, std::size_t num_actions, std::size_t num_states) {
  ConfidenceReport r;
  r.beta = beta;
  r.mode = ConfidenceMode::Generic;
  r.unique_interval_count = static_cast<double>(num_actions) * static_cast<double>(num_states);
  r.alpha = beta * r.unique_interval_count;
  return r;
}

ConfidenceReport symmetric_confidence(double beta, const std::vector<int>& counts, std::size_t num_actions) {
  ConfidenceReport r;
  r.beta = beta;
  r.mode = ConfidenceMode::Symmetric;
  double offsets = 1.0;
  for (int c : counts) offsets *= 2.0 * c - 1.0;
  r.unique_interval_count = offsets + static_cast<double>(num_actions);
  r.alpha = beta * r.unique_interval_count;
  return r;
}

ConfidenceReport aggregated_confidence(double beta, int rho, int horizon, std::size_t num_actions) {
  ConfidenceReport r;
  r.beta = beta;
  r.mode = ConfidenceMode::Aggregated;
  r.rho = rho;
  r.horizon = horizon;
  r.unique_interval_count = static_cast<double>(rho) * horizon * static_cast<double>(num_actions);
  r.alpha = beta * r.unique_interval_count;
  return r;
}

// ---------------------------------------------------------------------------
// Model

bool row_admits_distribution(std::span<const Transition> row, double tol) {
  double lo = 0.0, hi = 0.0;
  for (const auto& t : row) {
    lo += t.iv.low;
    hi += t.iv.up;
  }
  return lo <= 1.0 + tol && hi >= 1.0 - tol;
}

Imdp::Imdp(std::vector<StateLabel> labels, StateId initial, std::vector<std::vector<ActionId>> enabled,
           std::vector<IntervalRow> rows)
    : labels_(std::move(labels)), initial_(initial), enabled_(std::move(enabled)), rows_(std::move(rows)) {
  if (enabled_.size() != labels_.size()) throw std::invalid_argument("enabled map must cover every state");
  if (initial_ >= labels_.size()) throw std::out_of_range("initial state out of range");
  std::vector<char> used(rows_.size(), 0);
  for (const auto& acts : enabled_) {
    for (ActionId a : acts) {
      if (a >= rows_.size()) throw std::out_of_range("enabled action out of range");
      used[a] = 1;
    }
  }
  for (ActionId a = 0; a < rows_.size(); ++a) {
    for (const auto& t : rows_[a]) {
      if (t.dst >= labels_.size()) throw std::out_of_range("transition successor out of range");
    }
    if (used[a] && !row_admits_distribution(rows_[a])) {
      throw std::invalid_argument("interval row of action " + std::to_string(a) + " admits no distribution");
    }
  }
}

void Imdp::set_initial(StateId s) {
  if (s >= labels_.size()) throw std::out_of_range("initial state out of range");
  initial_ = s;
}

std::size_t Imdp::num_choices() const {
  std::size_t n = 0;
  for (const auto& acts : enabled_) n += acts.size();
  return n;
}

std::size_t Imdp::num_transitions() const {
  std::size_t n = 0;
  for (const auto& acts : enabled_)
    for (ActionId a : acts) n += rows_[a].size();
  return n;
}

// ---------------------------------------------------------------------------
// Robust Bellman backup

InnerResult inner_extreme(std::span<const Transition> row, std::span<const double> values, Sense sense) {
  double lo_sum = 0.0, up_sum = 0.0;
  for (const auto& t : row) {
    lo_sum += t.iv.low;
    up_sum += t.iv.up;
  }
  constexpr double kTol = 1e-9;
  if (lo_sum > 1.0 + kTol || up_sum < 1.0 - kTol) {
    throw std::invalid_argument("inner_extreme: interval row admits no distribution");
  }

  std::vector<std::size_t> order(row.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t i) { return values[row[i].dst]; };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = key(a), vb = key(b);
    if (va != vb) return sense == Sense::Min ? va < vb : va > vb;
    return row[a].dst < row[b].dst;
  });

  InnerResult res;
  res.witness.resize(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) res.witness[i] = row[i].iv.low;
  double slack = 1.0 - lo_sum;
  for (std::size_t i : order) {
    if (slack <= 0.0) break;
    const double room = row[i].iv.up - row[i].iv.low;
    const double add = std::min(room, slack);
    res.witness[i] = add == room ? row[i].iv.up : row[i].iv.low + add;
    slack -= add;
  }
  double e = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) e += res.witness[i] * values[row[i].dst];
  res.expectation = e;
  return res;
}

namespace {

// Expectation only; avoids the witness allocation in the hot loop.
double inner_value(std::span<const Transition> row, std::span<const double> values, Sense sense,
                   std::vector<std::size_t>& order) {
  double lo_sum = 0.0, e = 0.0;
  for (const auto& t : row) {
    lo_sum += t.iv.low;
    e += t.iv.low * values[t.dst];
  }
  order.resize(row.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = values[row[a].dst], vb = values[row[b].dst];
    if (va != vb) return sense == Sense::Min ? va < vb : va > vb;
    return row[a].dst < row[b].dst;
  });
  double slack = 1.0 - lo_sum;
  for (std::size_t i : order) {
    if (slack <= 0.0) break;
    const double add = std::min(row[i].iv.up - row[i].iv.low, slack);
    e += add * values[row[i].dst];
    slack -= add;
  }
  return e;
}

ValueVector terminal_values(const Imdp& m) {
  ValueVector v(m.num_states(), 0.0);
  for (StateId s = 0; s < m.num_states(); ++s) v[s] = m.is_goal(s) ? 1.0 : 0.0;
  return v;
}

// One synchronous sweep; returns the new values and the argmax actions.
void backup(const Imdp& m, const ValueVector& next, Sense sense, ValueVector& out, std::vector<std::int64_t>& act) {
  out.assign(m.num_states(), 0.0);
  act.assign(m.num_states(), kNoAction);
  std::vector<std::size_t> order;
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (m.is_goal(s)) {
      out[s] = 1.0;
      continue;
    }
    if (m.is_losing(s)) continue;
    double best = 0.0;
    std::int64_t best_a = kNoAction;
    for (ActionId a : m.enabled(s)) {
      const double v = inner_value(m.row(a), next, sense, order);
      if (best_a == kNoAction || v > best || (v == best && static_cast<std::int64_t>(a) < best_a)) {
        best = v;
        best_a = static_cast<std::int64_t>(a);
      }
    }
    out[s] = std::clamp(best, 0.0, 1.0);
    act[s] = best_a;
  }
}

}  // namespace

TimeVaryingPolicy::TimeVaryingPolicy(std::vector<std::vector<std::int64_t>> slices, bool stationary)
    : slices_(std::move(slices)), stationary_(stationary) {
  if (stationary_ && slices_.size() != 1) throw std::invalid_argument("stationary policy needs one slice");
}

std::int64_t TimeVaryingPolicy::action(StateId s, std::size_t k) const {
  if (slices_.empty()) return kNoAction;
  const auto& slice = stationary_ ? slices_.front() : slices_.at(k);
  return s < slice.size() ? slice[s] : kNoAction;
}

Solution robust_value_iteration(const Imdp& m, Horizon horizon, Bound bound, double tol) {
  const Sense sense = bound == Bound::Lower ? Sense::Min : Sense::Max;
  Solution sol;
  ValueVector v = terminal_values(m);
  if (horizon.is_finite()) {
    const int K = *horizon.steps;
    if (K < 0) throw std::invalid_argument("horizon must be non-negative");
    std::vector<std::vector<std::int64_t>> slices(static_cast<std::size_t>(K));
    sol.per_step.assign(static_cast<std::size_t>(K) + 1, ValueVector{});
    sol.per_step[K] = v;
    ValueVector next;
    for (int k = K - 1; k >= 0; --k) {
      backup(m, v, sense, next, slices[k]);
      v.swap(next);
      sol.per_step[k] = v;
    }
    sol.iterations = K;
    sol.policy = TimeVaryingPolicy(std::move(slices), false);
  } else {
    ValueVector next;
    std::vector<std::int64_t> act;
    constexpr int kMaxSweeps = 1'000'000;
    int it = 0;
    for (; it < kMaxSweeps; ++it) {
      backup(m, v, sense, next, act);
      double diff = 0.0;
      for (std::size_t s = 0; s < v.size(); ++s) diff = std::max(diff, std::abs(next[s] - v[s]));
      v.swap(next);
      if (diff < tol) break;
    }
    sol.iterations = it + 1;
    sol.policy = TimeVaryingPolicy({std::move(act)}, true);
  }
  sol.values = v;
  return sol;
}

// ---------------------------------------------------------------------------
// Aggregated (binned) synthesis

int value_bin(double v, int rho) {
  if (rho < 1) throw std::invalid_argument("rho must be >= 1");
  const int b = static_cast<int>(std::floor(v * rho));
  return std::clamp(b, 0, rho - 1);
}

AggregateStep aggregate_backup(const Imdp& m, const ValueVector& next_values, int rho) {
  if (rho < 1) throw std::invalid_argument("rho must be >= 1");
  if (next_values.size() != m.num_states()) throw std::invalid_argument("value vector size mismatch");

  std::vector<int> bin_of(m.num_states());
  std::vector<double> bin_value(static_cast<std::size_t>(rho), 2.0);
  for (StateId s = 0; s < m.num_states(); ++s) {
    bin_of[s] = value_bin(next_values[s], rho);
    bin_value[bin_of[s]] = std::min(bin_value[bin_of[s]], next_values[s]);
  }

  AggregateStep out;
  out.values.assign(m.num_states(), 0.0);
  out.actions.assign(m.num_states(), kNoAction);

  // Merged rows depend only on the action, so build each once.
  std::vector<IntervalRow> merged(m.num_actions());
  std::vector<char> built(m.num_actions(), 0);
  std::vector<double> lo(static_cast<std::size_t>(rho)), hi(static_cast<std::size_t>(rho));
  std::vector<char> hit(static_cast<std::size_t>(rho));
  auto merge = [&](ActionId a) -> const IntervalRow& {
    if (built[a]) return merged[a];
    std::fill(lo.begin(), lo.end(), 0.0);
    std::fill(hi.begin(), hi.end(), 0.0);
    std::fill(hit.begin(), hit.end(), 0);
    for (const auto& t : m.row(a)) {
      const int b = bin_of[t.dst];
      lo[b] += t.iv.low;
      hi[b] += t.iv.up;
      hit[b] = 1;
    }
    IntervalRow row;
    for (int b = 0; b < rho; ++b) {
      if (!hit[b]) continue;
      const double l = std::clamp(lo[b], 0.0, 1.0);
      const double u = std::clamp(hi[b], l, 1.0);
      row.push_back({static_cast<StateId>(b), ProbInterval(l, u)});
    }
    merged[a] = std::move(row);
    built[a] = 1;
    return merged[a];
  };

  std::vector<std::size_t> order;
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (m.is_goal(s)) {
      out.values[s] = 1.0;
      continue;
    }
    if (m.is_losing(s)) continue;
    double best = 0.0;
    std::int64_t best_a = kNoAction;
    for (ActionId a : m.enabled(s)) {
      const auto& row = merge(a);
      out.merged_transitions += row.size();
      const double v = inner_value(row, bin_value, Sense::Min, order);
      if (best_a == kNoAction || v > best || (v == best && static_cast<std::int64_t>(a) < best_a)) {
        best = v;
        best_a = static_cast<std::int64_t>(a);
      }
    }
    out.values[s] = std::clamp(best, 0.0, 1.0);
    out.actions[s] = best_a;
  }
  return out;
}

AggregatedSolution improved_synthesis(const Imdp& m, int K, int rho) {
  if (K < 0) throw std::invalid_argument("horizon must be non-negative");
  AggregatedSolution res;
  ValueVector v = terminal_values(m);
  std::vector<std::vector<std::int64_t>> slices(static_cast<std::size_t>(K));
  res.solution.per_step.assign(static_cast<std::size_t>(K) + 1, ValueVector{});
  res.solution.per_step[K] = v;
  for (int k = K - 1; k >= 0; --k) {
    auto step = aggregate_backup(m, v, rho);
    v = std::move(step.values);
    slices[k] = std::move(step.actions);
    res.solution.per_step[k] = v;
  }
  res.solution.values = v;
  res.solution.iterations = K;
  res.solution.policy = TimeVaryingPolicy(std::move(slices), false);
  res.confidence = aggregated_confidence(m.beta, rho, K, m.num_actions());
  return res;
}

// ---------------------------------------------------------------------------
// Explicit export

namespace {

std::string label_text(const Imdp& m, StateId s) {
  std::string out;
  switch (m.label(s)) {
    case StateLabel::Goal: out = "goal"; break;
    case StateLabel::Critical: out = "critical"; break;
    case StateLabel::Absorbing: out = "absorbing"; break;
    case StateLabel::None: break;
  }
  if (s == m.initial()) out += out.empty() ? "init" : ",init";
  return out.empty() ? "none" : out;
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void export_explicit(const Imdp& m, const std::string& states_path, const std::string& transitions_path) {
  {
    std::ofstream out(states_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open states file for writing: " + states_path);
    for (StateId s = 0; s < m.num_states(); ++s) out << s << ' ' << label_text(m, s) << '\n';
    if (!out) throw std::runtime_error("error writing states file: " + states_path);
  }
  std::ofstream out(transitions_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open transitions file for writing: " + transitions_path);
  for (StateId s = 0; s < m.num_states(); ++s) {
    std::vector<ActionId> acts = m.enabled(s);
    std::sort(acts.begin(), acts.end());
    for (ActionId a : acts) {
      for (const auto& t : m.row(a)) {
        out << s << ' ' << a << ' ' << t.dst << ' ' << fmt12(t.iv.low) << ' ' << fmt12(t.iv.up) << '\n';
      }
    }
  }
  if (!out) throw std::runtime_error("error writing transitions file: " + transitions_path);
}

Imdp parse_explicit(const std::string& states_path, const std::string& transitions_path) {
  std::ifstream sin(states_path);
  if (!sin) throw std::runtime_error("cannot open states file: " + states_path);
  std::vector<StateLabel> labels;
  std::optional<StateId> initial;
  std::string line;
  while (std::getline(sin, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    StateId id = 0;
    std::string lab;
    if (!(ls >> id >> lab) || id != labels.size()) {
      throw std::runtime_error("malformed states file line " + std::to_string(labels.size() + 1) + ": " + states_path);
    }
    StateLabel l = StateLabel::None;
    std::istringstream parts(lab);
    std::string tok;
    while (std::getline(parts, tok, ',')) {
      if (tok == "goal") l = StateLabel::Goal;
      else if (tok == "critical") l = StateLabel::Critical;
      else if (tok == "absorbing") l = StateLabel::Absorbing;
      else if (tok == "init") initial = id;
      else if (tok != "none") throw std::runtime_error("unknown state label '" + tok + "': " + states_path);
    }
    labels.push_back(l);
  }
  if (labels.empty()) throw std::runtime_error("states file is empty: " + states_path);

  std::ifstream tin(transitions_path);
  if (!tin) throw std::runtime_error("cannot open transitions file: " + transitions_path);
  std::map<std::pair<StateId, ActionId>, IntervalRow> rows_by_choice;
  std::size_t lineno = 0;
  while (std::getline(tin, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    StateId s = 0, d = 0;
    ActionId a = 0;
    double lo = 0, hi = 0;
    if (!(ls >> s >> a >> d >> lo >> hi) || s >= labels.size() || d >= labels.size()) {
      throw std::runtime_error("malformed transitions line " + std::to_string(lineno) + ": " + transitions_path);
    }
    rows_by_choice[{s, a}].push_back({d, ProbInterval(lo, hi)});
  }

  ActionId num_actions = 0;
  for (const auto& [key, row] : rows_by_choice) num_actions = std::max(num_actions, key.second + 1);
  std::vector<IntervalRow> rows(num_actions);
  std::vector<char> seen(num_actions, 0);
  std::vector<std::vector<ActionId>> enabled(labels.size());
  for (auto& [key, row] : rows_by_choice) {
    std::sort(row.begin(), row.end(), [](const Transition& x, const Transition& y) { return x.dst < y.dst; });
    const auto [s, a] = key;
    if (!seen[a]) {
      rows[a] = row;
      seen[a] = 1;
    } else if (rows[a] != row) {
      throw std::runtime_error("action " + std::to_string(a) + " has differing rows across states: " + transitions_path);
    }
    enabled[s].push_back(a);
  }
  return Imdp(std::move(labels), initial.value_or(0), std::move(enabled), std::move(rows));
}

}  // namespace pacabs
