#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "augdist/image.hpp"
#include "augdist/rng.hpp"
#include "augdist/transforms.hpp"

namespace augdist {

/// The nine AugMix base operations, in powerset bit order (bit i = entry i).
const std::array<std::string_view, 9>& base_augmentation_names();

/// Draws one base operation with AugMix magnitude conventions: level is
/// uniform in [0.1, magnitude], signed ops get a random sign.
TransformSpec sample_base_op(std::string_view name, double magnitude, Rng& rng);

/// A distribution over augmentations built by chaining base ops and mixing
/// parallel chains.
struct AugmentationScheme {
  std::vector<std::string> base_ops;
  int width = 3;               ///< number of parallel chains
  int depth = 3;               ///< chain length is uniform in [1, depth]
  double mix_concentration = 1.0;  ///< Dirichlet parameter of chain weights
  double skip_alpha = 1.0;     ///< Beta(skip_alpha, skip_beta) mixing weight
  double skip_beta = 1.0;
  double magnitude = 3.0;      ///< AugMix severity of each op, in (0.1, 10]

  /// Powerset index if base_ops is a subset of the base names, else the
  /// joined op names.
  std::string label() const;
  /// Throws DomainError when the scheme is malformed.
  void validate() const;
};

/// One concrete draw from a scheme. Applied as
///   out = skip_weight * x + (1 - skip_weight) * sum_i weights[i] * chain_i(x)
struct SampledAugmentation {
  std::vector<std::vector<TransformSpec>> branches;
  std::vector<double> weights;
  double skip_weight = 1.0;

  bool is_identity() const noexcept { return branches.empty() || skip_weight == 1.0; }
};

/// All 512 subsets of the base ops; scheme k contains base op i iff bit i of k
/// is set. Scheme 0 is the identity scheme.
std::vector<AugmentationScheme> enumerate_powerset(const AugmentationScheme& defaults = {});

/// Pure function of (scheme, seed). Empty base_ops yields the identity.
SampledAugmentation sample_augmentation(const AugmentationScheme& scheme, Seed seed);

/// Applies a sampled augmentation; result clamped to [0, 1].
ImageBuffer apply_augmentation(const SampledAugmentation& aug, const ImageBuffer& img,
                               const Registry& registry = Registry::builtin());

/// Convex combination of transform outputs before clamping:
///   sum_i weights[i] * t_i(x)
ImageBuffer mix_transforms(std::span<const TransformSpec> transforms, std::span<const double> weights,
                           const ImageBuffer& img, const Registry& registry = Registry::builtin());

}  // namespace augdist
