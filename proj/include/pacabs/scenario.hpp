#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace pacabs {

/// Closed probability interval [low, up] with 0 <= low <= up <= 1.
struct ProbInterval {
  double low = 0.0;
  double up = 0.0;

  ProbInterval() = default;
  ProbInterval(double lo, double hi);

  double width() const { return up - low; }
  bool contains(double p) const { return low <= p && p <= up; }
  friend bool operator==(const ProbInterval&, const ProbInterval&) = default;
};

inline constexpr double kDefaultRootTol = 1e-9;

/// Lower PAC bound on a transition probability given that n_out of N samples
/// fell outside the successor region: the p solving
///   beta / (2N) = sum_{i=0}^{n_out} C(N,i) (1-p)^i p^(N-i),
/// and 0 when n_out = N.
double p_low(std::size_t N, double beta, std::size_t n_out, double tol = kDefaultRootTol);

/// Upper PAC bound: the p solving
///   beta / (2N) = 1 - sum_{i=0}^{n_out-1} C(N,i) (1-p)^i p^(N-i),
/// and 1 when n_out = 0.
double p_up(std::size_t N, double beta, std::size_t n_out, double tol = kDefaultRootTol);

ProbInterval pac_interval(std::size_t N, double beta, std::size_t n_out, double tol = kDefaultRootTol);

/// log sum_{i=first}^{last} C(N,i) q^i (1-q)^(N-i), for 0 < q < 1.
/// Summed from the dominant term outward with compensated accumulation.
double log_binomial_range(std::size_t N, double q, std::size_t first, std::size_t last);

/// Precomputed PAC intervals for every n_out in 0..N at fixed (N, beta).
class IntervalTable {
 public:
  IntervalTable(std::size_t N, double beta, std::vector<ProbInterval> rows);

  std::size_t N() const { return N_; }
  double beta() const { return beta_; }
  const ProbInterval& operator[](std::size_t n_out) const { return rows_.at(n_out); }
  const std::vector<ProbInterval>& rows() const { return rows_; }

  void save(const std::string& path) const;
  static IntervalTable load(const std::string& path);

 private:
  std::size_t N_;
  double beta_;
  std::vector<ProbInterval> rows_;
};

IntervalTable build_table(std::size_t N, double beta, double tol = kDefaultRootTol);

/// Thread-safe in-memory cache of tables keyed by (N, beta).
class TableCache {
 public:
  std::shared_ptr<const IntervalTable> get(std::size_t N, double beta);

 private:
  std::mutex mu_;
  std::map<std::pair<std::size_t, double>, std::shared_ptr<const IntervalTable>> tables_;
};

/// Point estimate n_in / N.
double frequentist(std::size_t N, std::size_t n_in);

/// [n_in/N - eps, n_in/N + eps] clamped to [0,1], eps = sqrt(log(2/beta) / (2N)).
ProbInterval hoeffding_interval(std::size_t N, double beta, std::size_t n_in);

}  // namespace pacabs
