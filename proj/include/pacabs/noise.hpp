#pragma once

#include "pacabs/abstraction.hpp"
#include "pacabs/linsys.hpp"
#include "pacabs/rng.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace pacabs {

struct GaussianNoise {
  Vector mean;
  Matrix cov;
};

struct UniformNoise {
  Box box;
};

/// Independent per-dimension triangular distributions.
struct TriangularNoise {
  Vector lower;
  Vector mode;
  Vector upper;
};

/// Finite Gaussian mixture; with unequal component means it is skewed and
/// heavier-tailed than any single Gaussian.
struct MixtureNoise {
  std::vector<double> weights;
  std::vector<GaussianNoise> components;
};

/// Samples read from a CSV file (one sample per line). `grouped` marks files
/// that already hold grouped-system noise rather than base-step noise.
struct FileNoise {
  std::string path;
  bool grouped = false;
};

using NoiseSpec = std::variant<GaussianNoise, UniformNoise, TriangularNoise, MixtureNoise, FileNoise>;

class NoiseSampler {
 public:
  virtual ~NoiseSampler() = default;

  virtual Eigen::Index dim() const = 0;
  /// One base-step noise vector.
  virtual Vector draw(CounterRng& rng) = 0;
  /// One grouped-system noise vector w_bar = sum_i A^i w_{k+g-1-i}.
  virtual Vector draw_grouped(const GroupedSystem& gsys, CounterRng& rng);
  /// Marks the start of an interval-computation batch.
  virtual void begin_batch() {}
};

std::unique_ptr<NoiseSampler> make_sampler(const NoiseSpec& spec);

/// N i.i.d. grouped-noise samples for one interval batch.
SampleSet draw_samples(NoiseSampler& sampler, const GroupedSystem& gsys, std::size_t N, CounterRng& rng);

/// Reads a noise CSV: n comma-separated reals per line, optional header line.
std::vector<Vector> read_noise_csv(const std::string& path);

}  // namespace pacabs
