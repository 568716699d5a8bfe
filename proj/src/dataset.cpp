#include "augdist/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "augdist/errors.hpp"

namespace augdist {

namespace fs = std::filesystem;

std::string ImageSubset::fingerprint() const {
  std::uint64_t h = fnv1a64("");
  for (const auto& id : ids) {
    h = mix64(h ^ fnv1a64(id));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

bool is_png(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png";
}

}  // namespace

std::vector<std::string> list_images(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("not a directory: " + root.string());
  std::vector<std::string> ids;
  for (fs::recursive_directory_iterator it(root, ec), end; it != end; it.increment(ec)) {
    if (ec) throw IoError("cannot list " + root.string() + ": " + ec.message());
    if (it->is_regular_file() && is_png(it->path())) {
      ids.push_back(fs::relative(it->path(), root).generic_string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

std::vector<std::size_t> choose(std::size_t available, std::size_t n, Seed seed) {
  if (n > available) {
    throw SizeError("requested " + std::to_string(n) + " images but only " +
                    std::to_string(available) + " available");
  }
  Rng rng(derive(seed, "subset"));
  auto picked = rng.sample_indices(available, n);
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

ImageSubset sample_subset(const fs::path& dataset_dir, std::size_t n, Seed seed) {
  const auto listing = list_images(dataset_dir);
  ImageSubset subset;
  for (std::size_t i : choose(listing.size(), n, seed)) {
    subset.ids.push_back(listing[i]);
    subset.images.push_back(load_image(dataset_dir / listing[i]));
  }
  return subset;
}

ImageSubset sample_subset(const ImageSubset& pool, std::size_t n, Seed seed) {
  ImageSubset subset;
  for (std::size_t i : choose(pool.size(), n, seed)) {
    subset.ids.push_back(pool.ids[i]);
    subset.images.push_back(pool.images[i]);
  }
  return subset;
}

ImageSubset load_all(const fs::path& dataset_dir) {
  ImageSubset all;
  all.ids = list_images(dataset_dir);
  all.images.reserve(all.ids.size());
  for (const auto& id : all.ids) all.images.push_back(load_image(dataset_dir / id));
  return all;
}

ImageBuffer synthetic_image(int height, int width, Seed seed) {
  Rng rng(seed);
  ImageBuffer img(height, width);
  float base[3], gx[3], gy[3];
  for (int c = 0; c < 3; ++c) {
    base[c] = static_cast<float>(rng.uniform(0.2, 0.8));
    gx[c] = static_cast<float>(rng.uniform(-0.4, 0.4));
    gy[c] = static_cast<float>(rng.uniform(-0.4, 0.4));
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const float u = (x + 0.5f) / width - 0.5f;
      const float v = (y + 0.5f) / height - 0.5f;
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = base[c] + gx[c] * u + gy[c] * v;
    }
  }

  const int shapes = static_cast<int>(rng.uniform_int(2, 5));
  for (int s = 0; s < shapes; ++s) {
    const bool disc = rng.bernoulli(0.5);
    const double cx = rng.uniform(0, width), cy = rng.uniform(0, height);
    const double rx = rng.uniform(0.08, 0.3) * width, ry = rng.uniform(0.08, 0.3) * height;
    float colour[3];
    for (auto& c : colour) c = static_cast<float>(rng.uniform());
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double dx = (x + 0.5 - cx) / rx, dy = (y + 0.5 - cy) / ry;
        const bool inside = disc ? dx * dx + dy * dy <= 1.0 : std::fabs(dx) <= 1.0 && std::fabs(dy) <= 1.0;
        if (inside) {
          for (int c = 0; c < 3; ++c) img.at(y, x, c) = colour[c];
        }
      }
    }
  }

  // Texture: a random sinusoid plus fine grain.
  const double fx = rng.uniform(0.05, 0.45), fy = rng.uniform(0.05, 0.45);
  const double phase = rng.uniform(0, 6.283185307179586);
  const double amp = rng.uniform(0.0, 0.08);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double t = amp * std::sin(6.283185307179586 * (fx * x + fy * y) + phase);
      for (int c = 0; c < 3; ++c) {
        img.at(y, x, c) += static_cast<float>(t + 0.02 * rng.normal());
      }
    }
  }
  img.clamp();
  return img;
}

ImageSubset synthetic_pool(std::size_t count, int height, int width, Seed seed) {
  ImageSubset pool;
  pool.ids.reserve(count);
  pool.images.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "synthetic/%05zu.png", i);
    pool.ids.emplace_back(name);
    pool.images.push_back(synthetic_image(height, width, derive(seed, "synthetic", i)));
  }
  return pool;
}

void write_pool(const ImageSubset& pool, const fs::path& dir) {
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const fs::path out = dir / pool.ids[i];
    std::error_code ec;
    fs::create_directories(out.parent_path(), ec);
    if (ec) throw IoError("cannot create " + out.parent_path().string() + ": " + ec.message());
    save_image(pool.images[i], out);
  }
}

}  // namespace augdist
