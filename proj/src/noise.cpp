#include "pacabs/noise.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pacabs {

namespace {

// Symmetric square root of a PSD covariance; tolerates singular covariances.
Matrix psd_factor(const Matrix& cov) {
  if (cov.rows() != cov.cols()) throw std::invalid_argument("covariance must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  const Vector ev = es.eigenvalues();
  if (ev.size() > 0 && ev.minCoeff() < -1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("covariance is not positive semidefinite");
  }
  return es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

double unit(CounterRng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

class GaussianSampler final : public NoiseSampler {
 public:
  explicit GaussianSampler(const GaussianNoise& g) : mean_(g.mean), L_(psd_factor(g.cov)) {
    if (mean_.size() != L_.rows()) throw std::invalid_argument("mean and covariance dimensions differ");
  }
  Eigen::Index dim() const override { return mean_.size(); }
  Vector draw(CounterRng& rng) override {
    std::normal_distribution<double> nd;
    Vector z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = nd(rng);
    return mean_ + L_ * z;
  }

 private:
  Vector mean_;
  Matrix L_;
};

class UniformSampler final : public NoiseSampler {
 public:
  explicit UniformSampler(const UniformNoise& u) : box_(u.box) {}
  Eigen::Index dim() const override { return box_.dim(); }
  Vector draw(CounterRng& rng) override {
    Vector x(box_.dim());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = box_.lower(i) + unit(rng) * (box_.upper(i) - box_.lower(i));
    return x;
  }

 private:
  Box box_;
};

class TriangularSampler final : public NoiseSampler {
 public:
  explicit TriangularSampler(const TriangularNoise& t) : t_(t) {
    const auto n = t.lower.size();
    if (t.mode.size() != n || t.upper.size() != n) throw std::invalid_argument("triangular bounds differ in size");
    if ((t.lower.array() > t.mode.array()).any() || (t.mode.array() > t.upper.array()).any() ||
        (t.lower.array() >= t.upper.array()).any()) {
      throw std::invalid_argument("triangular noise needs lower <= mode <= upper and lower < upper");
    }
  }
  Eigen::Index dim() const override { return t_.lower.size(); }
  Vector draw(CounterRng& rng) override {
    Vector x(dim());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double a = t_.lower(i), c = t_.mode(i), b = t_.upper(i);
      const double u = unit(rng);
      const double f = (c - a) / (b - a);
      x(i) = u < f ? a + std::sqrt(u * (b - a) * (c - a)) : b - std::sqrt((1 - u) * (b - a) * (b - c));
    }
    return x;
  }

 private:
  TriangularNoise t_;
};

class MixtureSampler final : public NoiseSampler {
 public:
  explicit MixtureSampler(const MixtureNoise& m) : weights_(m.weights) {
    if (m.components.empty() || m.components.size() != m.weights.size()) {
      throw std::invalid_argument("mixture needs one weight per component");
    }
    for (double w : weights_) {
      if (!(w >= 0)) throw std::invalid_argument("mixture weights must be nonnegative");
    }
    if (std::accumulate(weights_.begin(), weights_.end(), 0.0) <= 0) throw std::invalid_argument("mixture weights sum to zero");
    for (const auto& c : m.components) comps_.emplace_back(c);
    for (const auto& c : comps_) {
      if (c.dim() != comps_.front().dim()) throw std::invalid_argument("mixture components differ in dimension");
    }
  }
  Eigen::Index dim() const override { return comps_.front().dim(); }
  Vector draw(CounterRng& rng) override {
    std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
    return comps_[pick(rng)].draw(rng);
  }

 private:
  std::vector<double> weights_;
  std::vector<GaussianSampler> comps_;
};

class FileSampler final : public NoiseSampler {
 public:
  explicit FileSampler(const FileNoise& f) : rows_(read_noise_csv(f.path)), grouped_(f.grouped) {
    if (rows_.empty()) throw std::invalid_argument("noise file holds no samples: " + f.path);
  }
  Eigen::Index dim() const override { return rows_.front().size(); }
  Vector draw(CounterRng&) override {
    if (cursor_ >= rows_.size()) {
      throw std::runtime_error("noise file exhausted: a batch needs more samples than the file holds");
    }
    return rows_[cursor_++];
  }
  Vector draw_grouped(const GroupedSystem& gsys, CounterRng& rng) override {
    if (grouped_) return draw(rng);
    return NoiseSampler::draw_grouped(gsys, rng);
  }
  void begin_batch() override { cursor_ = 0; }

 private:
  std::vector<Vector> rows_;
  bool grouped_;
  std::size_t cursor_ = 0;
};

}  // namespace

Vector NoiseSampler::draw_grouped(const GroupedSystem& gsys, CounterRng& rng) {
  std::vector<Vector> ws;
  ws.reserve(gsys.group());
  for (int i = 0; i < gsys.group(); ++i) ws.push_back(draw(rng));
  return gsys.combine_noise(ws);
}

std::unique_ptr<NoiseSampler> make_sampler(const NoiseSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::unique_ptr<NoiseSampler> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GaussianNoise>) return std::make_unique<GaussianSampler>(s);
        else if constexpr (std::is_same_v<T, UniformNoise>) return std::make_unique<UniformSampler>(s);
        else if constexpr (std::is_same_v<T, TriangularNoise>) return std::make_unique<TriangularSampler>(s);
        else if constexpr (std::is_same_v<T, MixtureNoise>) return std::make_unique<MixtureSampler>(s);
        else return std::make_unique<FileSampler>(s);
      },
      spec);
}

SampleSet draw_samples(NoiseSampler& sampler, const GroupedSystem& gsys, std::size_t N, CounterRng& rng) {
  if (sampler.dim() != gsys.n()) throw std::invalid_argument("noise dimension differs from the state dimension");
  sampler.begin_batch();
  std::vector<Vector> out;
  out.reserve(N);
  for (std::size_t i = 0; i < N; ++i) out.push_back(sampler.draw_grouped(gsys, rng));
  std::ostringstream prov;
  prov << "seed=" << rng.seed() << " stream=" << rng.stream();
  return SampleSet(std::move(out), rng.seed(), prov.str());
}

std::vector<Vector> read_noise_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open noise file: " + path);
  std::vector<Vector> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string tok;
    bool numeric = true;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(tok, &used));
        if (tok.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw std::runtime_error("malformed noise line in " + path + ": " + line);
    }
    first = false;
    if (!rows.empty() && static_cast<Eigen::Index>(vals.size()) != rows.front().size()) {
      throw std::runtime_error("noise lines differ in length in " + path);
    }
    rows.push_back(Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  }
  return rows;
}

}  // namespace pacabs
