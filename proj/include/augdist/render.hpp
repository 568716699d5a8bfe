#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "augdist/dataset.hpp"
#include "augdist/transforms.hpp"

namespace augdist {

/// One rendered file.
struct ManifestRecord {
  std::string spec;  // TransformSpec::key()
  std::string file;  // path relative to the output root, generic form
  Seed seed;         // per-image sub-seed the transform ran with
};

/// Seed of one spec within a render: derive(seed, "render", fnv1a64(key)).
inline Seed render_spec_seed(Seed seed, const TransformSpec& spec) noexcept {
  return derive(seed, "render", fnv1a64(spec.key()));
}

/// Applies every spec to every PNG under input_dir and writes
/// <output_dir>/<spec key>/<relative path>, where the key is
/// "<name>/<severity>" for corruptions. Image `id` runs with seed
/// image_seed(render_spec_seed(seed, spec), id), overriding spec.seed.
/// Also writes <output_dir>/manifest.tsv (columns spec, file, seed; seed as 16
/// hex digits), records ordered by spec then image. Throws IoError when the
/// output cannot be written and ConfigError for two specs with the same key.
std::vector<ManifestRecord> render_dataset(const std::filesystem::path& input_dir, std::span<const TransformSpec> specs,
                                           const std::filesystem::path& output_dir, Seed seed,
                                           const Registry& registry = Registry::builtin());

std::string format_manifest(std::span<const ManifestRecord> records);

}  // namespace augdist
