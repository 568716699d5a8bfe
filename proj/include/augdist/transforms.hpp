#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "augdist/image.hpp"
#include "augdist/rng.hpp"

namespace augdist {

enum class TransformKind { augmentation, corruption_reference, corruption_cbar };

std::string_view to_string(TransformKind kind);

using Params = std::map<std::string, double, std::less<>>;

/// A fully parameterized, seeded, deterministic image -> image function.
///
/// Corruptions take their parameters from the registry's severity table;
/// entries in `params` override table values. Base augmentations have no
/// severity and need every parameter supplied in `params`.
/// The name "identity" is accepted everywhere a transform is and returns
/// its input unchanged; it is not a registry entry.
struct TransformSpec {
  std::string name;
  Params params;
  std::optional<int> severity;
  Seed seed;

  /// "name/severity" for corruptions, "name" otherwise.
  std::string key() const;
};

/// Sub-seed used when one transform instance is applied to a named image:
/// derive(seed, "image", fnv1a64(image_id)).
inline Seed image_seed(Seed seed, std::string_view image_id) noexcept {
  return derive(seed, "image", fnv1a64(image_id));
}

/// Resolved parameters handed to a transform kernel.
class ParamSet {
public:
  explicit ParamSet(Params values) : values_(std::move(values)) {}
  double get(std::string_view name) const;
  int get_int(std::string_view name) const;
  /// Spatial lengths are stored in units of 1/32 of the shorter image side.
  double length(std::string_view name, const ImageBuffer& img) const;
  const Params& values() const noexcept { return values_; }

private:
  Params values_;
};

using TransformFn = ImageBuffer (*)(const ImageBuffer&, const ParamSet&, Rng&);

struct ParamRange {
  std::string name;
  double lo;
  double hi;
  bool integer = false;
};

struct RegistryEntry {
  std::string name;
  TransformKind kind;
  int min_severity = 0;  // 0/0 for augmentations
  int max_severity = 0;
  std::vector<ParamRange> params;
  std::string description;
  TransformFn fn = nullptr;
};

struct RegistryListing {
  std::string name;
  TransformKind kind;
  int min_severity;
  int max_severity;
};

/// Per-corruption, per-parameter values indexed by severity - 1.
using SeverityTable = std::map<std::string, std::map<std::string, std::vector<double>, std::less<>>, std::less<>>;

/// Parses the severity config format:
///
///   # comment
///   [corruption_name]
///   param = v1 v2 ... vN     (one value per severity, or a single value
///                             used for every severity)
SeverityTable parse_severity_config(std::string_view text);

/// The shipped severity table (config/severities.cfg, compiled in).
std::string_view default_severity_config();

class Registry {
public:
  /// Registry with the shipped severity table.
  static const Registry& builtin();
  /// Registry whose severity table is the shipped one overlaid with the
  /// sections and parameters of `text`; validated against every entry.
  static Registry with_severity_config(std::string_view text);

  const RegistryEntry& find(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<RegistryListing> list() const;
  std::vector<std::string> names(TransformKind kind) const;

  /// Validates `spec` and returns the merged parameter set.
  Params resolve(const TransformSpec& spec) const;
  ImageBuffer apply(const TransformSpec& spec, const ImageBuffer& img) const;

  const SeverityTable& severity_table() const noexcept { return table_; }

private:
  explicit Registry(SeverityTable table);
  std::vector<RegistryEntry> entries_;
  SeverityTable table_;
};

std::vector<RegistryListing> registry_list();
/// apply_transform against the builtin registry.
ImageBuffer apply_transform(const TransformSpec& spec, const ImageBuffer& img);

/// Parses "name", "name:severity" or "name:severity:key=value,key=value" and
/// "name::key=value" (no severity).
TransformSpec parse_transform_spec(std::string_view text, Seed seed);

namespace detail {
// Entry tables, defined next to the transform implementations.
std::vector<RegistryEntry> augmentation_entries();
std::vector<RegistryEntry> reference_corruption_entries();
std::vector<RegistryEntry> cbar_corruption_entries();
}  // namespace detail

/// In-process baseline JPEG round trip (JFIF colour transform, 4:2:0 chroma,
/// 8x8 DCT, IJG-scaled Annex K quantization tables) at quality 1..100.
ImageBuffer jpeg_roundtrip(const ImageBuffer& img, int quality);

}  // namespace augdist
