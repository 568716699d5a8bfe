#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "augdist/features.hpp"

namespace augdist {

/// A set of feature vectors from one extractor, stored as a contiguous
/// row-major matrix.
class SampleSet {
public:
  SampleSet(std::size_t dim, std::string fingerprint);
  static SampleSet from(std::span<const FeatureVector> vectors);
  static SampleSet from(std::span<const TransformFeature> features);

  /// Throws FingerprintError on dim or fingerprint mismatch.
  void add(const FeatureVector& v);
  void add_row(std::span<const double> values);
  void reserve(std::size_t rows) { data_.reserve(rows * dim_); }

  std::size_t size() const noexcept { return dim_ == 0 ? count_ : data_.size() / dim_; }
  bool empty() const noexcept { return size() == 0; }
  std::size_t dim() const noexcept { return dim_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }
  const double* row(std::size_t i) const noexcept { return data_.data() + i * dim_; }
  const std::vector<double>& data() const noexcept { return data_; }
  FeatureVector vector(std::size_t i) const;
  FeatureVector mean() const;

private:
  std::size_t dim_;
  std::size_t count_ = 0;  // only used when dim_ == 0
  std::string fingerprint_;
  std::vector<double> data_;
};

struct DistanceReport {
  double msd = 0.0;
  double mmd = 0.0;
  std::size_t argmin = 0;
  std::size_t count = 0;
};

/// min_a ||a - center|| over the samples. Throws DomainError when empty and
/// FingerprintError on mismatch.
double msd(const SampleSet& samples, const FeatureVector& center);
/// msd with its argmin, plus mmd between the sample mean and the center.
DistanceReport distance_report(const SampleSet& samples, const FeatureVector& center);

/// Streaming MSD over arbitrarily many samples in O(dim) memory. Samples
/// added in the same order give the same result as `distance_report`.
class MsdAccumulator {
public:
  explicit MsdAccumulator(FeatureVector center);
  void add(const FeatureVector& v);
  void add(const SampleSet& set);
  std::size_t count() const noexcept { return count_; }
  DistanceReport report() const;

private:
  FeatureVector center_;
  std::vector<double> sum_;
  double best_sq_;
  std::size_t argmin_ = 0;
  std::size_t count_ = 0;
};

/// ||mean(a) - mean(b)||.
double mmd(const SampleSet& a, const SampleSet& b);
double mmd(const FeatureVector& mean_a, const FeatureVector& mean_b);
double euclidean(const FeatureVector& a, const FeatureVector& b);

/// 1-based ranks with ties given the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> xs);
/// Pearson correlation of average ranks. Throws DomainError on length
/// mismatch or n < 2, UndefinedError when either side has no rank variance.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Round-robin ordering of features against several centers: position
/// k*|centers| + j holds the (k+1)-th closest still-unused feature to center
/// j. Ties in distance go to the lower feature index. Returns indices.
std::vector<std::size_t> rank_augmentations(const SampleSet& features, std::span<const FeatureVector> centers);

enum class SubsetMode { random, closest, farthest };

SubsetMode parse_subset_mode(std::string_view text);

/// closest: first k; farthest: last k; random: uniform k-subset drawn with
/// derive(seed, "select-subset"), kept in ranked order.
std::vector<std::size_t> select_subset(std::span<const std::size_t> ordered, std::size_t k, SubsetMode mode, Seed seed);

struct VarianceProbeOptions {
  std::size_t n_images = 100;
  std::size_t n_corruptions = 100;
  std::size_t repeats = 10;
};

struct VarianceProbeResult {
  std::vector<double> distances;  // one per repeat
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  double percent = 0.0;  // 100 * stddev / mean
};

/// The augmentation whose distance the probe tracks: one draw of the full
/// nine-op scheme.
SampledAugmentation default_probe_augmentation(Seed seed);

/// Repeat r draws an image subset of n_images from the pool with
/// derive(s_r, "probe-images"), a corruption center of n_corruptions draws with
/// derive(s_r, "probe-corruption"), and records ||f(probe) - center||.
VarianceProbeResult variance_probe(const Extractor& extractor, std::string_view corruption, int severity,
                                   const ImageSubset& pool, std::size_t n_images, std::size_t n_corruptions,
                                   std::span<const Seed> repeat_seeds, const SampledAugmentation& probe,
                                   const Registry& registry = Registry::builtin());
/// Repeat seeds derive(seed, "probe-repeat", r); probe = default_probe_augmentation(seed).
VarianceProbeResult variance_probe(const Extractor& extractor, std::string_view corruption, int severity,
                                   const ImageSubset& pool, const VarianceProbeOptions& options, Seed seed,
                                   const Registry& registry = Registry::builtin());

}  // namespace augdist
