#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace augdist {

/// Root of every random stream in the toolkit.
struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

/// SplitMix64 output finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// 64-bit FNV-1a over the bytes of `text`.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Sub-stream seed for (seed, purpose, index):
///   mix64(mix64(seed ^ fnv1a64(purpose)) + index * 0x9E3779B97F4A7C15).
constexpr Seed derive(Seed seed, std::string_view purpose, std::uint64_t index = 0) noexcept {
  return Seed{mix64(mix64(seed.value ^ fnv1a64(purpose)) + index * 0x9E3779B97F4A7C15ULL)};
}

/// Portable generator. State transition is SplitMix64:
///   state += 0x9E3779B97F4A7C15; output = mix64(state).
/// All distributions are implemented here so that streams do not depend on
/// the standard library's unspecified distribution algorithms.
class Rng {
public:
  explicit Rng(Seed seed) noexcept : state_(seed.value) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound), unbiased (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound);
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  bool bernoulli(double p) noexcept { return uniform() < p; }
  double normal() noexcept;
  double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }
  /// Gamma(shape, 1), Marsaglia-Tsang.
  double gamma(double shape);
  double beta(double a, double b);
  std::vector<double> dirichlet(double concentration, std::size_t k);
  /// Poisson(mean). Inversion for small means, PTRS (Hormann 1993) otherwise.
  std::uint64_t poisson(double mean);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// k distinct indices from [0, n) in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace augdist
