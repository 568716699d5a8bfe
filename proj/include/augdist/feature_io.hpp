#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "augdist/features.hpp"

// CBF1 feature files. Layout, all integers little-endian:
//
//   "CBF1"                      4 bytes magic
//   u32 dim
//   u64 count
//   u32 n, n bytes              fingerprint (UTF-8)
//   count x (u32 n, n bytes)    ids (UTF-8)
//   count * dim float32         row-major values
//
// Values are stored as IEEE-754 binary32, so a round trip is exact for
// vectors whose values are representable in single precision.

namespace augdist {

struct FeatureRecord {
  std::string id;
  std::vector<double> values;
};

/// In-memory CBF1 contents with an id index.
class FeatureTable {
public:
  FeatureTable(std::string fingerprint, std::size_t dim);

  const std::string& fingerprint() const noexcept { return fingerprint_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return records_.size(); }
  const std::vector<FeatureRecord>& records() const noexcept { return records_; }

  /// Throws FormatError on dim mismatch or duplicate id.
  void add(std::string id, std::vector<double> values);
  void add(std::string id, const FeatureVector& v);
  const FeatureRecord* find(std::string_view id) const;
  /// Throws LookupError for a missing id.
  FeatureVector vector(std::string_view id) const;

private:
  std::string fingerprint_;
  std::size_t dim_;
  std::vector<FeatureRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

void write_features(const std::filesystem::path& path, const FeatureTable& table);
/// Throws IoError when unreadable, FormatError for bad magic, truncation,
/// trailing bytes or a dim different from `expected_dim`.
FeatureTable read_features(const std::filesystem::path& path, std::optional<std::size_t> expected_dim = {});

/// Exact byte size of a CBF1 file for the given contents.
std::size_t feature_file_size(const FeatureTable& table);

}  // namespace augdist
