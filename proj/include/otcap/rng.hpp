#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace otcap {

// Self-contained splitmix64 stream. Used instead of <random> engines so that
// sampled values are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Derives an independent stream for task `index` of a run keyed by `seed`.
// Results are then invariant under any parallel schedule.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  Rng mix(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  return mix.next_u64();
}

// One sample from Dirichlet(1,...,1): normalized unit exponentials.
inline std::vector<double> dirichlet_row(Rng& rng, std::size_t k) {
  std::vector<double> g(k);
  double sum = 0.0;
  for (auto& gi : g) {
    gi = -std::log1p(-rng.next_double());
    sum += gi;
  }
  if (sum <= 0.0) return std::vector<double>(k, 1.0 / static_cast<double>(k));
  for (auto& gi : g) gi /= sum;
  return g;
}

}  // namespace otcap
