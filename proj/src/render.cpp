#include "augdist/render.hpp"

#include <cstdio>
#include <exception>
#include <fstream>
#include <set>

#include "augdist/errors.hpp"
#include "parallel.hpp"

namespace augdist {

std::string format_manifest(std::span<const ManifestRecord> records) {
  std::string out = "spec\tfile\tseed\n";
  char hex[17];
  for (const auto& r : records) {
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(r.seed.value));
    out += r.spec + "\t" + r.file + "\t" + hex + "\n";
  }
  return out;
}

std::vector<ManifestRecord> render_dataset(const std::filesystem::path& input_dir, std::span<const TransformSpec> specs,
                                           const std::filesystem::path& output_dir, Seed seed,
                                           const Registry& registry) {
  std::set<std::string> keys;
  for (const auto& s : specs) {
    registry.resolve(s);
    if (!keys.insert(s.key()).second) throw ConfigError("two render specs share the output key " + s.key());
  }
  const auto ids = list_images(input_dir);
  try {
    std::filesystem::create_directories(output_dir);
    for (const auto& s : specs) {
      for (const auto& id : ids) std::filesystem::create_directories((output_dir / s.key() / id).parent_path());
    }
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(std::string("cannot create output tree: ") + e.what());
  }

  std::vector<ManifestRecord> records(specs.size() * ids.size());
  detail::parallel_for(ids.size(), [&](std::size_t i) {
    const ImageBuffer img = load_image(input_dir / ids[i]);
    for (std::size_t k = 0; k < specs.size(); ++k) {
      TransformSpec t = specs[k];
      t.seed = image_seed(render_spec_seed(seed, specs[k]), ids[i]);
      const std::string rel = t.key() + "/" + ids[i];
      save_image(registry.apply(t, img), output_dir / rel);
      records[k * ids.size() + i] = {t.key(), rel, t.seed};
    }
  });

  std::ofstream manifest(output_dir / "manifest.tsv", std::ios::trunc);
  manifest << format_manifest(records);
  if (!manifest) throw IoError("cannot write " + (output_dir / "manifest.tsv").string());
  return records;
}

}  // namespace augdist
