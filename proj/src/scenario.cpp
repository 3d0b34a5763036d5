#include "pacabs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pacabs {

ProbInterval::ProbInterval(double lo, double hi) : low(lo), up(hi) {
  if (!(0.0 <= low && low <= up && up <= 1.0)) {
    std::ostringstream os;
    os << "invalid probability interval [" << lo << ", " << hi << "]";
    throw std::invalid_argument(os.str());
  }
}

namespace {

void check_args(std::size_t N, double beta, std::size_t n_out) {
  if (N < 1) throw std::invalid_argument("sample count N must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  if (n_out > N) throw std::invalid_argument("n_out must not exceed N");
}

// Bisection on a function that is increasing in p; returns the crossing of `target`.
template <typename F>
double bisect_increasing(F f, double target, double tol) {
  double lo = 0.0, hi = 1.0;
  const double stop = tol / 64.0;
  for (int it = 0; it < 200 && hi - lo > stop; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double log_binomial_range(std::size_t N, double q, std::size_t first, std::size_t last) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("log_binomial_range: q must lie in (0, 1)");
  if (first > last || last > N) throw std::invalid_argument("log_binomial_range: bad index range");
  const double n = static_cast<double>(N);
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);

  // The terms are unimodal in i; anchor at the largest term inside the range.
  const double mode_d = std::floor((n + 1.0) * q);
  std::size_t mode = mode_d < 0 ? 0 : static_cast<std::size_t>(std::min(mode_d, n));
  const std::size_t a = std::clamp(mode, first, last);
  const double ad = static_cast<double>(a);
  const double log_anchor = std::lgamma(n + 1.0) - std::lgamma(ad + 1.0) - std::lgamma(n - ad + 1.0) +
                            ad * log_q + (n - ad) * log_1mq;

  // Kahan-compensated sum of terms scaled by the anchor term.
  double sum = 1.0, comp = 0.0;
  auto add = [&](double t) {
    const double y = t - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  };
  constexpr double kNegligible = 1e-20;
  const double odds = q / (1.0 - q);
  double t = 1.0;
  for (std::size_t i = a; i > first; --i) {
    // t_{i-1} = t_i * i / (N - i + 1) / odds
    t *= static_cast<double>(i) / (n - static_cast<double>(i) + 1.0) / odds;
    if (t < kNegligible * sum) break;
    add(t);
  }
  t = 1.0;
  for (std::size_t i = a; i < last; ++i) {
    // t_{i+1} = t_i * (N - i) / (i + 1) * odds
    t *= (n - static_cast<double>(i)) / (static_cast<double>(i) + 1.0) * odds;
    if (t < kNegligible * sum) break;
    add(t);
  }
  return log_anchor + std::log(sum);
}

double p_low(std::size_t N, double beta, std::size_t n_out, double tol) {
  check_args(N, beta, n_out);
  if (n_out == N) return 0.0;
  const double target = std::log(beta / (2.0 * static_cast<double>(N)));
  // P[Bin(N, 1-p) <= n_out] grows with p.
  auto f = [&](double p) { return log_binomial_range(N, 1.0 - p, 0, n_out); };
  return bisect_increasing(f, target, tol);
}

double p_up(std::size_t N, double beta, std::size_t n_out, double tol) {
  check_args(N, beta, n_out);
  if (n_out == 0) return 1.0;
  const double target = std::log(beta / (2.0 * static_cast<double>(N)));
  // P[Bin(N, 1-p) >= n_out] shrinks with p; bisect on its negation.
  auto f = [&](double p) { return -log_binomial_range(N, 1.0 - p, n_out, N); };
  return bisect_increasing(f, -target, tol);
}

ProbInterval pac_interval(std::size_t N, double beta, std::size_t n_out, double tol) {
  const double lo = p_low(N, beta, n_out, tol);
  const double hi = p_up(N, beta, n_out, tol);
  return ProbInterval(std::min(lo, hi), std::max(lo, hi));
}

IntervalTable::IntervalTable(std::size_t N, double beta, std::vector<ProbInterval> rows)
    : N_(N), beta_(beta), rows_(std::move(rows)) {
  if (rows_.size() != N_ + 1) throw std::invalid_argument("interval table needs N+1 rows");
}

IntervalTable build_table(std::size_t N, double beta, double tol) {
  std::vector<ProbInterval> rows;
  rows.reserve(N + 1);
  for (std::size_t k = 0; k <= N; ++k) rows.push_back(pac_interval(N, beta, k, tol));
  return IntervalTable(N, beta, std::move(rows));
}

void IntervalTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write interval table: " + path);
  out << std::setprecision(12);
  out << N_ << ' ' << beta_ << '\n';
  for (std::size_t k = 0; k <= N_; ++k) out << k << ' ' << rows_[k].low << ' ' << rows_[k].up << '\n';
  if (!out) throw std::runtime_error("error writing interval table: " + path);
}

IntervalTable IntervalTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read interval table: " + path);
  std::size_t N = 0;
  double beta = 0.0;
  if (!(in >> N >> beta)) throw std::runtime_error("malformed interval table header: " + path);
  std::vector<ProbInterval> rows(N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    std::size_t idx = 0;
    double lo = 0.0, hi = 0.0;
    if (!(in >> idx >> lo >> hi) || idx != k) {
      throw std::runtime_error("malformed interval table row " + std::to_string(k) + ": " + path);
    }
    rows[k] = ProbInterval(lo, hi);
  }
  return IntervalTable(N, beta, std::move(rows));
}

std::shared_ptr<const IntervalTable> TableCache::get(std::size_t N, double beta) {
  std::lock_guard lock(mu_);
  auto& slot = tables_[{N, beta}];
  if (!slot) slot = std::make_shared<const IntervalTable>(build_table(N, beta));
  return slot;
}

double frequentist(std::size_t N, std::size_t n_in) {
  if (N == 0) throw std::invalid_argument("frequentist estimate needs N >= 1");
  if (n_in > N) throw std::invalid_argument("n_in must not exceed N");
  return static_cast<double>(n_in) / static_cast<double>(N);
}

ProbInterval hoeffding_interval(std::size_t N, double beta, std::size_t n_in) {
  const double p = frequentist(N, n_in);
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  const double eps = std::sqrt(std::log(2.0 / beta) / (2.0 * static_cast<double>(N)));
  return ProbInterval(std::max(0.0, p - eps), std::min(1.0, p + eps));
}

}  // namespace pacabs
