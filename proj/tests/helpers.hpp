#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "augdist/distances.hpp"
#include "augdist/rng.hpp"

namespace augdist::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("augdist-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline FeatureVector random_vector(Rng& rng, std::size_t dim, double scale = 1.0, const std::string& fp = "test") {
  FeatureVector v{std::vector<double>(dim), fp};
  for (auto& x : v.values) x = rng.normal(0.0, scale);
  return v;
}

inline SampleSet random_set(Rng& rng, std::size_t n, std::size_t dim, double scale = 1.0,
                            const std::string& fp = "test") {
  SampleSet s(dim, fp);
  for (std::size_t i = 0; i < n; ++i) s.add(random_vector(rng, dim, scale, fp));
  return s;
}

inline FeatureVector vec(std::vector<double> values, const std::string& fp = "test") {
  return FeatureVector{std::move(values), fp};
}

}  // namespace augdist::testing
