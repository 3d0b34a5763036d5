#include "pacabs/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace pacabs {

SampleSet::SampleSet(std::vector<Vector> s, std::uint64_t seed_, std::string prov)
    : samples(std::move(s)), seed(seed_), provenance(std::move(prov)) {
  if (samples.empty()) throw std::invalid_argument("sample set must not be empty");
  const auto n = samples.front().size();
  for (const auto& w : samples) {
    if (w.size() != n) throw std::invalid_argument("samples must share one dimension");
  }
}

StateActionGraph::StateActionGraph(Partition part, std::vector<ActionDef> actions)
    : part_(std::move(part)), actions_(std::move(actions)), enabled_(part_.num_cells() + 1) {
  for (const auto& a : actions_) {
    for (StateId s : a.enabled_in) {
      if (s >= part_.num_cells()) throw std::out_of_range("actions may only be enabled in cell states");
      enabled_[s].push_back(a.id);
    }
  }
  for (auto& acts : enabled_) std::sort(acts.begin(), acts.end());
}

std::size_t StateActionGraph::num_choices() const {
  std::size_t n = 0;
  for (const auto& acts : enabled_) n += acts.size();
  return n;
}

StateActionGraph build_states_actions(const Partition& part, const GroupedSystem& gsys, double input_slack) {
  if (gsys.n() != part.dim()) throw std::invalid_argument("partition and system dimensions differ");
  if (!gsys.full_row_rank()) {
    throw RankDeficientError("grouped input matrix is not full row rank; no region fits a backward reachable set");
  }
  const std::size_t cells = part.num_cells();
  std::vector<ActionDef> actions(cells);
  for (std::size_t t = 0; t < cells; ++t) {
    actions[t].id = t;
    actions[t].target = part.cell_center(t);
  }

  BrsContainment brs(gsys, input_slack);
  if (brs.closed_form()) {
    std::vector<Vector> coords(cells);
    for (std::size_t t = 0; t < cells; ++t) coords[t] = brs.target_coordinates(actions[t].target);
    for (std::size_t s = 0; s < cells; ++s) {
      const Box win = *brs.target_window(part.cell_box(s));
      if ((win.lower.array() > win.upper.array()).any()) continue;
      for (std::size_t t = 0; t < cells; ++t) {
        const Vector& c = coords[t];
        if ((c.array() >= win.lower.array()).all() && (c.array() <= win.upper.array()).all()) {
          actions[t].enabled_in.push_back(s);
        }
      }
    }
  } else {
    for (std::size_t s = 0; s < cells; ++s) {
      const Box cell = part.cell_box(s);
      for (std::size_t t = 0; t < cells; ++t) {
        if (brs.contains(cell, actions[t].target)) actions[t].enabled_in.push_back(s);
      }
    }
  }
  return StateActionGraph(part, std::move(actions));
}

std::size_t CountVector::count(StateId s) const {
  auto it = std::lower_bound(n_in.begin(), n_in.end(), s, [](const auto& e, StateId v) { return e.first < v; });
  return it != n_in.end() && it->first == s ? it->second : 0;
}

std::size_t CountVector::total() const {
  std::size_t t = 0;
  for (const auto& e : n_in) t += e.second;
  return t;
}

namespace {

CountVector compress(std::vector<StateId>& ids, std::size_t N) {
  std::sort(ids.begin(), ids.end());
  CountVector cv;
  cv.N = N;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    cv.n_in.emplace_back(ids[i], j - i);
    i = j;
  }
  return cv;
}

}  // namespace

CountVector count_successors(const ActionDef& action, const SampleSet& samples, const StateActionGraph& graph) {
  std::vector<StateId> ids;
  ids.reserve(samples.size());
  for (const auto& w : samples.samples) ids.push_back(graph.locate(action.target + w));
  return compress(ids, samples.size());
}

IntervalRow intervals_for_action(const CountVector& counts, const IntervalTable& table) {
  if (counts.N != table.N()) throw std::invalid_argument("interval table built for a different sample count");
  IntervalRow row;
  row.reserve(counts.n_in.size());
  for (const auto& [s, n] : counts.n_in) {
    if (n == 0) continue;
    row.push_back({s, table[counts.N - n]});
  }
  return row;
}

IntervalRow frequentist_row(const CountVector& counts) {
  IntervalRow row;
  row.reserve(counts.n_in.size());
  for (const auto& [s, n] : counts.n_in) {
    if (n == 0) continue;
    const double p = frequentist(counts.N, n);
    row.push_back({s, ProbInterval(p, p)});
  }
  return row;
}

double symmetric_offset_count(const Partition& part) {
  double c = 1.0;
  for (int r : part.counts()) c *= 2.0 * r - 1.0;
  return c;
}

BuildResult build_imdp(const StateActionGraph& graph, const SampleSet& samples, const IntervalTable& table,
                       StateId initial, BuildOptions opts) {
  const Partition& part = graph.partition();
  if (samples.size() != table.N()) throw std::invalid_argument("interval table built for a different sample count");
  if (samples.dim() != part.dim()) throw std::invalid_argument("sample dimension differs from the state dimension");
  if (opts.mode == ConfidenceMode::Aggregated) {
    throw std::invalid_argument("aggregated confidence is produced by improved_synthesis, not at build time");
  }

  const std::size_t num_actions = graph.num_actions();
  std::vector<char> used(num_actions, 0);
  for (StateId s = 0; s < graph.num_states(); ++s)
    for (ActionId a : graph.enabled(s)) used[a] = 1;

  auto make_row = [&](const CountVector& cv) {
    return opts.source == IntervalSource::Pac ? intervals_for_action(cv, table) : frequentist_row(cv);
  };

  std::vector<IntervalRow> rows(num_actions);
  if (opts.mode == ConfidenceMode::Symmetric) {
    const auto n = part.dim();
    for (const auto& a : graph.actions()) {
      if ((a.target - part.cell_center(a.id)).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + a.target.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("symmetric mode requires every action to target its own cell centre");
      }
    }
    // Histogram of the cell offset of target + w relative to the target cell.
    std::map<MultiIndex, std::size_t> hist;
    for (const auto& w : samples.samples) {
      MultiIndex off(n);
      for (Eigen::Index i = 0; i < n; ++i) off[i] = static_cast<int>(std::floor(0.5 + w(i) / part.widths()(i)));
      ++hist[off];
    }
    for (ActionId a = 0; a < num_actions; ++a) {
      if (!used[a]) continue;
      const MultiIndex base = part.multi_index(a);
      std::size_t inside = 0;
      CountVector cv;
      cv.N = samples.size();
      for (const auto& [off, c] : hist) {
        MultiIndex idx(n);
        bool ok = true;
        for (Eigen::Index i = 0; i < n && ok; ++i) {
          idx[i] = base[i] + off[i];
          ok = idx[i] >= 0 && idx[i] < part.counts()[i];
        }
        if (!ok) continue;
        cv.n_in.emplace_back(part.flat_index(idx), c);
        inside += c;
      }
      std::sort(cv.n_in.begin(), cv.n_in.end());
      if (inside < cv.N) cv.n_in.emplace_back(graph.absorbing(), cv.N - inside);
      rows[a] = make_row(cv);
    }
  } else {
    for (const auto& a : graph.actions()) {
      if (!used[a.id]) continue;
      rows[a.id] = make_row(count_successors(a, samples, graph));
    }
  }

  std::vector<StateLabel> labels(graph.num_states(), StateLabel::None);
  for (std::size_t c = 0; c < part.num_cells(); ++c) {
    if (part.is_goal(c)) labels[c] = StateLabel::Goal;
    else if (part.is_critical(c)) labels[c] = StateLabel::Critical;
  }
  labels[graph.absorbing()] = StateLabel::Absorbing;

  std::vector<std::vector<ActionId>> enabled(graph.num_states());
  for (StateId s = 0; s < graph.num_states(); ++s) enabled[s] = graph.enabled(s);

  Imdp m(std::move(labels), initial, std::move(enabled), std::move(rows));
  m.num_samples = samples.size();
  m.beta = table.beta();

  const ConfidenceReport conf = opts.mode == ConfidenceMode::Symmetric
                                    ? symmetric_confidence(table.beta(), part.counts(), num_actions)
                                    : generic_confidence(table.beta(), num_actions, graph.num_states());
  return BuildResult{std::move(m), conf};
}

}  // namespace pacabs
