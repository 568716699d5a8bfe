#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "augdist/rng.hpp"

namespace augdist {

/// Settings shared by the command-line tools. Defaults follow the paper's
/// operating point: 100 images, 100 corruption draws per center, 100k
/// augmentation draws, 100k candidate benchmarks within 1 error point.
struct RunConfig {
  Seed seed;
  bool seed_given = false;
  int jobs = 0;  // 0 = OpenMP default

  std::filesystem::path dataset;
  std::filesystem::path features;
  std::filesystem::path errors;
  std::filesystem::path output;
  std::filesystem::path severity_config;

  std::string extractor = "builtin";  // or a CBF1 file path

  std::size_t n_images = 100;
  std::size_t n_corruption_draws = 100;
  std::size_t n_augmentation_draws = 100000;
  std::size_t n_candidates = 100000;

  double tolerance = 1.0;
  double band = 0.5;

  /// Throws ConfigError for zero budgets, negative tolerances, or a seed that
  /// is missing while the CI environment variable is set.
  void validate() const;
};

/// Throws ConfigError unless `path` names an existing file or directory.
void require_exists(const std::filesystem::path& path, const std::string& what);

}  // namespace augdist
