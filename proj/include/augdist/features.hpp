#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "augdist/augmix.hpp"
#include "augdist/dataset.hpp"
#include "augdist/image.hpp"
#include "augdist/transforms.hpp"

namespace augdist {

struct FeatureVector {
  std::vector<double> values;
  std::string fingerprint;  // extractor identity; vectors with different fingerprints never mix

  std::size_t dim() const noexcept { return values.size(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Throws FingerprintError unless both vectors come from the same extractor
/// and have the same dimension.
void check_compatible(const FeatureVector& a, const FeatureVector& b);

class FeatureTable;

enum class ExtractorKind { builtin_pixelstats, external_file };

/// Configuration of the builtin pixel-statistics extractor.
///
/// Output layout, for a luminance image L (Rec.601) and RGB channels:
///   [0, grid*grid)           mean of L over each cell of a grid x grid partition, row-major
///   next 6                   per-channel mean (R, G, B), then per-channel population std
///   last `bands` values      sqrt of the spectral power of L in equal-width radial
///                            frequency bands (DC excluded), power normalized by (H*W)^2
struct BuiltinConfig {
  int grid = 8;
  int bands = 8;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(grid * grid + 6 + bands); }
};

/// f-hat: maps an image to a feature vector. Either the builtin extractor or
/// a lookup into a feature file produced by an external embedder, keyed by
/// image id.
class Extractor {
public:
  static Extractor builtin(BuiltinConfig config = {});
  /// Loads a CBF1 file. The fingerprint is the file's stored fingerprint, or
  /// a hash of the file bytes when none is stored.
  static Extractor from_file(const std::filesystem::path& path);
  static Extractor from_table(std::shared_ptr<const FeatureTable> table);

  ExtractorKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }
  const BuiltinConfig& config() const noexcept { return config_; }

  /// The builtin extractor ignores `id`; the file extractor ignores `img`.
  FeatureVector embed(const ImageBuffer& img, std::string_view id) const;

private:
  Extractor() = default;
  ExtractorKind kind_ = ExtractorKind::builtin_pixelstats;
  BuiltinConfig config_;
  std::size_t dim_ = 0;
  std::string fingerprint_;
  std::shared_ptr<const FeatureTable> table_;
};

FeatureVector embed_image(const Extractor& extractor, const ImageBuffer& img, std::string_view id = {});

/// f(t) for one transform: the mean over the subset of f-hat(t(x)) - f-hat(x).
struct TransformFeature {
  std::string transform_id;
  FeatureVector feature;
  std::string subset_id;
  std::string fingerprint;
};

/// Clean-image embeddings of a subset, computed once and shared by every
/// featurization over that subset.
class EmbeddedSubset {
public:
  EmbeddedSubset(const Extractor& extractor, const ImageSubset& subset);

  const Extractor& extractor() const noexcept { return *extractor_; }
  const ImageSubset& subset() const noexcept { return *subset_; }
  const FeatureVector& clean(std::size_t i) const { return clean_[i]; }
  const std::string& subset_id() const noexcept { return subset_id_; }

private:
  const Extractor* extractor_;
  const ImageSubset* subset_;
  std::vector<FeatureVector> clean_;
  std::string subset_id_;
};

/// Corruption or augmentation given by name. Image i is transformed with
/// seed image_seed(t.seed, id_i). With a file extractor the transformed image
/// is looked up as "<t.key()>/<id_i>".
TransformFeature featurize_transform(const EmbeddedSubset& subset, const TransformSpec& t,
                                     const Registry& registry = Registry::builtin());
/// One sampled augmentation applied to every image. With a file extractor the
/// transformed image is looked up as "<label>/<id_i>".
TransformFeature featurize_transform(const EmbeddedSubset& subset, const SampledAugmentation& a,
                                     std::string_view label, const Registry& registry = Registry::builtin());

TransformFeature featurize_transform(const Extractor& extractor, const TransformSpec& t, const ImageSubset& subset);
TransformFeature featurize_transform(const Extractor& extractor, const SampledAugmentation& a,
                                     std::string_view label, const ImageSubset& subset);

/// Mean over i of transformed[i] - clean(i), summed in image order.
FeatureVector mean_difference(const EmbeddedSubset& subset, std::span<const FeatureVector> transformed);

struct CenterOptions {
  std::size_t n_samples = 100;
  /// Draw k uses the single image k mod |subset| instead of the whole subset,
  /// pairing each corruption draw with one image.
  bool paired = false;
};

/// E_c[f(c)]: mean of featurize_transform over n seeded corruption draws.
/// Draw k uses seed derive(seed, "corruption-draw", k).
FeatureVector corruption_center(const EmbeddedSubset& subset, std::string_view corruption, int severity,
                                CenterOptions options, Seed seed, const Registry& registry = Registry::builtin());

/// Seed used for draw k of a corruption center.
inline Seed corruption_draw_seed(Seed seed, std::size_t k) noexcept { return derive(seed, "corruption-draw", k); }

}  // namespace augdist
