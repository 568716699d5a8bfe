#include "augdist/config.hpp"

#include <cstdlib>

#include "augdist/errors.hpp"

namespace augdist {

void RunConfig::validate() const {
  if (n_images < 1 || n_corruption_draws < 1 || n_augmentation_draws < 1 || n_candidates < 1) {
    throw ConfigError("sample budgets must be >= 1");
  }
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be >= 0");
  if (!(band >= 0.0)) throw ConfigError("band must be >= 0");
  if (jobs < 0) throw ConfigError("--jobs must be >= 0");
  const char* ci = std::getenv("CI");
  if (ci && *ci && !seed_given) throw ConfigError("--seed is required when CI is set");
  if (!severity_config.empty()) require_exists(severity_config, "severity config");
}

void require_exists(const std::filesystem::path& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " path is required");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) throw ConfigError(what + " not found: " + path.string());
}

}  // namespace augdist
