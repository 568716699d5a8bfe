#include "augdist/augmix.hpp"

#include <algorithm>
#include <cmath>

#include "augdist/errors.hpp"

namespace augdist {

std::string AugmentationScheme::label() const {
  const auto& names = base_augmentation_names();
  unsigned mask = 0;
  for (const auto& op : base_ops) {
    auto it = std::find(names.begin(), names.end(), op);
    if (it == names.end()) {
      std::string joined;
      for (const auto& o : base_ops) joined += (joined.empty() ? "" : "+") + o;
      return joined;
    }
    mask |= 1u << (it - names.begin());
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "powerset/%03u", mask);
  return buf;
}

void AugmentationScheme::validate() const {
  const auto& names = base_augmentation_names();
  for (const auto& op : base_ops) {
    if (std::find(names.begin(), names.end(), op) == names.end()) {
      throw DomainError("not a base augmentation: " + op);
    }
  }
  if (width < 1 || depth < 1) throw DomainError("scheme width and depth must be >= 1");
  if (!(mix_concentration > 0) || !(skip_alpha > 0) || !(skip_beta > 0)) {
    throw DomainError("scheme Dirichlet/Beta parameters must be positive");
  }
  if (!(magnitude >= 0.1 && magnitude <= 10.0)) throw DomainError("scheme magnitude must be in [0.1, 10]");
}

std::vector<AugmentationScheme> enumerate_powerset(const AugmentationScheme& defaults) {
  const auto& names = base_augmentation_names();
  std::vector<AugmentationScheme> schemes;
  schemes.reserve(512);
  for (unsigned mask = 0; mask < 512; ++mask) {
    AugmentationScheme s = defaults;
    s.base_ops.clear();
    for (unsigned i = 0; i < names.size(); ++i) {
      if (mask & (1u << i)) s.base_ops.emplace_back(names[i]);
    }
    schemes.push_back(std::move(s));
  }
  return schemes;
}

SampledAugmentation sample_augmentation(const AugmentationScheme& scheme, Seed seed) {
  scheme.validate();
  SampledAugmentation out;
  if (scheme.base_ops.empty()) return out;
  Rng rng(derive(seed, "augmentation"));
  out.weights = rng.dirichlet(scheme.mix_concentration, static_cast<std::size_t>(scheme.width));
  // AugMix draws m ~ Beta and blends (1 - m) * x + m * mix.
  out.skip_weight = 1.0 - rng.beta(scheme.skip_alpha, scheme.skip_beta);
  out.branches.resize(static_cast<std::size_t>(scheme.width));
  for (auto& chain : out.branches) {
    const auto length = rng.uniform_int(1, scheme.depth);
    for (std::int64_t d = 0; d < length; ++d) {
      const auto& op = scheme.base_ops[rng.below(scheme.base_ops.size())];
      chain.push_back(sample_base_op(op, scheme.magnitude, rng));
    }
  }
  return out;
}

ImageBuffer apply_augmentation(const SampledAugmentation& aug, const ImageBuffer& img, const Registry& registry) {
  if (aug.is_identity()) return img;
  if (aug.weights.size() != aug.branches.size()) throw DomainError("augmentation weights/branches mismatch");
  std::vector<ImageBuffer> parts;
  std::vector<double> weights;
  parts.reserve(aug.branches.size() + 1);
  parts.push_back(img);
  weights.push_back(aug.skip_weight);
  for (std::size_t b = 0; b < aug.branches.size(); ++b) {
    ImageBuffer x = img;
    for (const auto& spec : aug.branches[b]) x = registry.apply(spec, x);
    parts.push_back(std::move(x));
    weights.push_back((1.0 - aug.skip_weight) * aug.weights[b]);
  }
  ImageBuffer out = weighted_sum(parts, weights);
  out.clamp();
  return out;
}

ImageBuffer mix_transforms(std::span<const TransformSpec> transforms, std::span<const double> weights,
                           const ImageBuffer& img, const Registry& registry) {
  std::vector<ImageBuffer> parts;
  parts.reserve(transforms.size());
  for (const auto& t : transforms) parts.push_back(registry.apply(t, img));
  return weighted_sum(parts, weights);
}

}  // namespace augdist
