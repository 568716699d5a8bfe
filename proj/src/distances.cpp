#include "augdist/distances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "augdist/errors.hpp"
#include "augdist/kernels.hpp"

namespace augdist {

SampleSet::SampleSet(std::size_t dim, std::string fingerprint) : dim_(dim), fingerprint_(std::move(fingerprint)) {}

SampleSet SampleSet::from(std::span<const FeatureVector> vectors) {
  if (vectors.empty()) throw DomainError("cannot infer the shape of an empty sample set");
  SampleSet s(vectors[0].dim(), vectors[0].fingerprint);
  s.reserve(vectors.size());
  for (const auto& v : vectors) s.add(v);
  return s;
}

SampleSet SampleSet::from(std::span<const TransformFeature> features) {
  if (features.empty()) throw DomainError("cannot infer the shape of an empty sample set");
  SampleSet s(features[0].feature.dim(), features[0].feature.fingerprint);
  s.reserve(features.size());
  for (const auto& f : features) s.add(f.feature);
  return s;
}

void SampleSet::add(const FeatureVector& v) {
  if (v.fingerprint != fingerprint_) {
    throw FingerprintError("sample from extractor " + v.fingerprint + " added to set of " + fingerprint_);
  }
  add_row(v.values);
}

void SampleSet::add_row(std::span<const double> values) {
  if (values.size() != dim_) throw FingerprintError("sample dim " + std::to_string(values.size()) +
                                                    " does not match set dim " + std::to_string(dim_));
  data_.insert(data_.end(), values.begin(), values.end());
  if (dim_ == 0) ++count_;
}

FeatureVector SampleSet::vector(std::size_t i) const {
  return {std::vector<double>(row(i), row(i) + dim_), fingerprint_};
}

FeatureVector SampleSet::mean() const {
  if (empty()) throw DomainError("mean of an empty sample set");
  FeatureVector m{std::vector<double>(dim_), fingerprint_};
  kernels::omp::column_means(data_.data(), size(), dim_, m.values.data());
  return m;
}

namespace {

void check_center(const SampleSet& samples, const FeatureVector& center) {
  if (samples.empty()) throw DomainError("msd needs at least one sample");
  if (center.fingerprint != samples.fingerprint()) {
    throw FingerprintError("center from extractor " + center.fingerprint + ", samples from " + samples.fingerprint());
  }
  if (center.dim() != samples.dim()) throw FingerprintError("center dim does not match sample dim");
}

}  // namespace

double euclidean(const FeatureVector& a, const FeatureVector& b) {
  check_compatible(a, b);
  return std::sqrt(kernels::squared_distance(a.values.data(), b.values.data(), a.dim()));
}

double msd(const SampleSet& samples, const FeatureVector& center) {
  check_center(samples, center);
  return std::sqrt(kernels::omp::nearest(samples.data().data(), samples.size(), samples.dim(), center.values.data())
                       .distance_sq);
}

DistanceReport distance_report(const SampleSet& samples, const FeatureVector& center) {
  check_center(samples, center);
  const auto best = kernels::omp::nearest(samples.data().data(), samples.size(), samples.dim(), center.values.data());
  return {std::sqrt(best.distance_sq), euclidean(samples.mean(), center), best.index, samples.size()};
}

MsdAccumulator::MsdAccumulator(FeatureVector center)
    : center_(std::move(center)), sum_(center_.dim(), 0.0), best_sq_(std::numeric_limits<double>::infinity()) {}

void MsdAccumulator::add(const FeatureVector& v) {
  check_compatible(v, center_);
  const double d = kernels::squared_distance(v.values.data(), center_.values.data(), v.dim());
  if (d < best_sq_) {
    best_sq_ = d;
    argmin_ = count_;
  }
  for (std::size_t k = 0; k < sum_.size(); ++k) sum_[k] += v.values[k];
  ++count_;
}

void MsdAccumulator::add(const SampleSet& set) {
  if (set.empty()) return;
  check_center(set, center_);
  const auto best = kernels::omp::nearest(set.data().data(), set.size(), set.dim(), center_.values.data());
  if (best.distance_sq < best_sq_) {
    best_sq_ = best.distance_sq;
    argmin_ = count_ + best.index;
  }
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t k = 0; k < sum_.size(); ++k) sum_[k] += set.row(i)[k];
  count_ += set.size();
}

DistanceReport MsdAccumulator::report() const {
  if (count_ == 0) throw DomainError("msd needs at least one sample");
  FeatureVector mean{sum_, center_.fingerprint};
  for (auto& v : mean.values) v /= static_cast<double>(count_);
  return {std::sqrt(best_sq_), euclidean(mean, center_), argmin_, count_};
}

double mmd(const FeatureVector& mean_a, const FeatureVector& mean_b) { return euclidean(mean_a, mean_b); }

double mmd(const SampleSet& a, const SampleSet& b) {
  if (a.empty() || b.empty()) throw DomainError("mmd needs nonempty sample sets");
  return euclidean(a.mean(), b.mean());
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && xs[order[j]] == xs[order[i]]) ++j;
    // Positions i..j-1 share the mean of the 1-based ranks i+1..j.
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DomainError("spearman inputs differ in length");
  if (xs.size() < 2) throw DomainError("spearman needs at least two pairs");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::isnan(xs[i]) || std::isnan(ys[i])) throw DomainError("spearman input contains NaN");
  }
  const auto rx = average_ranks(xs), ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mean = (n + 1.0) / 2.0;  // average ranks always sum to n(n+1)/2
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double a = rx[i] - mean, b = ry[i] - mean;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedError("spearman is undefined when one input is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<std::size_t> rank_augmentations(const SampleSet& features, std::span<const FeatureVector> centers) {
  if (centers.empty()) throw DomainError("rank_augmentations needs at least one center");
  const std::size_t n = features.size();
  std::vector<std::vector<std::size_t>> by_center(centers.size());
  for (std::size_t j = 0; j < centers.size(); ++j) {
    check_center(features, centers[j]);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = kernels::squared_distance(features.row(i), centers[j].values.data(), features.dim());
    }
    auto& order = by_center[j];
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  }
  std::vector<char> used(n, 0);
  std::vector<std::size_t> cursor(centers.size(), 0);
  std::vector<std::size_t> out;
  out.reserve(n);
  while (out.size() < n) {
    for (std::size_t j = 0; j < centers.size() && out.size() < n; ++j) {
      auto& c = cursor[j];
      while (used[by_center[j][c]]) ++c;
      used[by_center[j][c]] = 1;
      out.push_back(by_center[j][c]);
    }
  }
  return out;
}

SubsetMode parse_subset_mode(std::string_view text) {
  if (text == "random") return SubsetMode::random;
  if (text == "closest") return SubsetMode::closest;
  if (text == "farthest") return SubsetMode::farthest;
  throw ConfigError("subset mode must be random, closest or farthest, got '" + std::string(text) + "'");
}

std::vector<std::size_t> select_subset(std::span<const std::size_t> ordered, std::size_t k, SubsetMode mode,
                                       Seed seed) {
  if (k > ordered.size()) {
    throw DomainError("cannot select " + std::to_string(k) + " of " + std::to_string(ordered.size()) + " features");
  }
  switch (mode) {
    case SubsetMode::closest:
      return {ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(k)};
    case SubsetMode::farthest:
      return {ordered.end() - static_cast<std::ptrdiff_t>(k), ordered.end()};
    case SubsetMode::random: {
      Rng rng(derive(seed, "select-subset"));
      auto picks = rng.sample_indices(ordered.size(), k);
      std::sort(picks.begin(), picks.end());
      std::vector<std::size_t> out;
      out.reserve(k);
      for (auto p : picks) out.push_back(ordered[p]);
      return out;
    }
  }
  return {};
}

SampledAugmentation default_probe_augmentation(Seed seed) {
  AugmentationScheme all;
  for (auto name : base_augmentation_names()) all.base_ops.emplace_back(name);
  return sample_augmentation(all, derive(seed, "probe-augmentation"));
}

VarianceProbeResult variance_probe(const Extractor& extractor, std::string_view corruption, int severity,
                                   const ImageSubset& pool, std::size_t n_images, std::size_t n_corruptions,
                                   std::span<const Seed> repeat_seeds, const SampledAugmentation& probe,
                                   const Registry& registry) {
  if (repeat_seeds.size() < 2) throw DomainError("variance probe needs at least two repeats");
  if (n_images < 1 || n_corruptions < 1) throw DomainError("variance probe budgets must be >= 1");
  VarianceProbeResult result;
  for (Seed s : repeat_seeds) {
    const ImageSubset subset = sample_subset(pool, n_images, derive(s, "probe-images"));
    const EmbeddedSubset embedded(extractor, subset);
    const FeatureVector center = corruption_center(embedded, corruption, severity, {n_corruptions, false},
                                                   derive(s, "probe-corruption"), registry);
    const TransformFeature f = featurize_transform(embedded, probe, "probe", registry);
    result.distances.push_back(euclidean(f.feature, center));
  }
  const double n = static_cast<double>(result.distances.size());
  result.mean = std::accumulate(result.distances.begin(), result.distances.end(), 0.0) / n;
  double ss = 0;
  for (double d : result.distances) ss += (d - result.mean) * (d - result.mean);
  result.stddev = std::sqrt(ss / (n - 1.0));
  if (result.mean == 0.0) throw UndefinedError("variance probe distances have zero mean");
  result.percent = 100.0 * result.stddev / result.mean;
  return result;
}

VarianceProbeResult variance_probe(const Extractor& extractor, std::string_view corruption, int severity,
                                   const ImageSubset& pool, const VarianceProbeOptions& options, Seed seed,
                                   const Registry& registry) {
  std::vector<Seed> seeds;
  for (std::size_t r = 0; r < options.repeats; ++r) seeds.push_back(derive(seed, "probe-repeat", r));
  return variance_probe(extractor, corruption, severity, pool, options.n_images, options.n_corruptions, seeds,
                        default_probe_augmentation(seed), registry);
}

}  // namespace augdist
