#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "augdist/image.hpp"
#include "augdist/rng.hpp"

namespace augdist {

/// A fixed set of images that every transform featurization is averaged over.
/// `ids` are relative paths (generic form) in canonical order.
struct ImageSubset {
  std::vector<std::string> ids;
  std::vector<ImageBuffer> images;

  std::size_t size() const noexcept { return images.size(); }
  bool empty() const noexcept { return images.empty(); }
  /// Stable identifier of the membership: hex FNV-1a over the joined ids.
  std::string fingerprint() const;
};

/// All PNG files under `root` (recursively, class subfolders allowed) as
/// generic relative paths sorted by byte-wise lexicographic order.
std::vector<std::string> list_images(const std::filesystem::path& root);

/// Chooses n images uniformly without replacement. Membership is drawn by a
/// partial Fisher-Yates shuffle of the canonical listing using the stream
/// derive(seed, "subset"); the result is returned in canonical order.
ImageSubset sample_subset(const std::filesystem::path& dataset_dir, std::size_t n, Seed seed);

/// Same selection rule over an in-memory pool.
ImageSubset sample_subset(const ImageSubset& pool, std::size_t n, Seed seed);

/// Reads every image of the listing.
ImageSubset load_all(const std::filesystem::path& dataset_dir);

/// Procedural stand-in for natural images: a smooth colour gradient with a
/// few random discs and rectangles plus mild texture. Deterministic in seed.
ImageBuffer synthetic_image(int height, int width, Seed seed);

/// `count` synthetic images with ids "synthetic/00000.png", ...
ImageSubset synthetic_pool(std::size_t count, int height, int width, Seed seed);

/// Writes a pool as PNG files under `dir` using the ids as relative paths.
void write_pool(const ImageSubset& pool, const std::filesystem::path& dir);

}  // namespace augdist
