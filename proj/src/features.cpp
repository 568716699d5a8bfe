#include "augdist/features.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>

#include "augdist/errors.hpp"
#include "augdist/feature_io.hpp"
#include "augdist/imgproc.hpp"
#include "parallel.hpp"

namespace augdist {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<std::complex<double>> twiddles(int n) {
  std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) w[k] = std::polar(1.0, -2.0 * std::numbers::pi * k / n);
  return w;
}

// Sum of |DFT(L)|^2 per radial band, DC excluded. Direct separable DFT; the
// images this runs on are small enough that an FFT is not worth a dependency.
std::vector<double> band_power(const imgproc::Field& lum, int bands) {
  const int h = lum.height, w = lum.width;
  const auto wy = twiddles(h), wx = twiddles(w);
  std::vector<std::complex<double>> rows(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    for (int v = 0; v < w; ++v) {
      std::complex<double> s = 0;
      for (int x = 0; x < w; ++x) s += static_cast<double>(lum.at(y, x)) * wx[(static_cast<std::size_t>(v) * x) % w];
      rows[static_cast<std::size_t>(y) * w + v] = s;
    }
  }
  std::vector<double> power(static_cast<std::size_t>(bands), 0.0);
  const double rmax = std::sqrt(0.5);
  for (int u = 0; u < h; ++u) {
    const double fy = static_cast<double>(u <= h / 2 ? u : u - h) / h;
    for (int v = 0; v < w; ++v) {
      if (u == 0 && v == 0) continue;
      std::complex<double> s = 0;
      for (int y = 0; y < h; ++y) s += rows[static_cast<std::size_t>(y) * w + v] * wy[(static_cast<std::size_t>(u) * y) % h];
      const double fx = static_cast<double>(v <= w / 2 ? v : v - w) / w;
      const double r = std::sqrt(fy * fy + fx * fx) / rmax;
      const int band = std::min(bands - 1, static_cast<int>(r * bands));
      power[static_cast<std::size_t>(band)] += std::norm(s);
    }
  }
  return power;
}

std::vector<double> builtin_features(const ImageBuffer& img, const BuiltinConfig& cfg) {
  if (img.empty()) throw DomainError("cannot embed an empty image");
  const int h = img.height(), w = img.width(), g = cfg.grid;
  const imgproc::Field lum = imgproc::luminance(img);
  std::vector<double> out;
  out.reserve(cfg.dim());

  for (int gy = 0; gy < g; ++gy) {
    const int y0 = std::min(h - 1, gy * h / g), y1 = std::max(y0 + 1, (gy + 1) * h / g);
    for (int gx = 0; gx < g; ++gx) {
      const int x0 = std::min(w - 1, gx * w / g), x1 = std::max(x0 + 1, (gx + 1) * w / g);
      double s = 0;
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) s += lum.at(y, x);
      out.push_back(s / ((y1 - y0) * (x1 - x0)));
    }
  }

  double sum[3] = {0, 0, 0}, sq[3] = {0, 0, 0};
  const auto data = img.data();
  for (std::size_t i = 0; i < data.size(); ++i) sum[i % 3] += data[i];
  const double n = static_cast<double>(img.pixel_count());
  for (int c = 0; c < 3; ++c) out.push_back(sum[c] / n);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double d = data[i] - sum[i % 3] / n;
    sq[i % 3] += d * d;
  }
  for (int c = 0; c < 3; ++c) out.push_back(std::sqrt(sq[c] / n));

  for (double p : band_power(lum, cfg.bands)) out.push_back(std::sqrt(p) / n);
  return out;
}

}  // namespace

void check_compatible(const FeatureVector& a, const FeatureVector& b) {
  if (a.fingerprint != b.fingerprint) {
    throw FingerprintError("features from different extractors: " + a.fingerprint + " vs " + b.fingerprint);
  }
  if (a.dim() != b.dim()) {
    throw FingerprintError("feature dims differ: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

Extractor Extractor::builtin(BuiltinConfig config) {
  if (config.grid < 1 || config.bands < 1) throw ConfigError("builtin extractor grid and bands must be >= 1");
  Extractor e;
  e.kind_ = ExtractorKind::builtin_pixelstats;
  e.config_ = config;
  e.dim_ = config.dim();
  e.fingerprint_ = "builtin-" +
                   hex64(fnv1a64("pixelstats/v1/grid=" + std::to_string(config.grid) + "/bands=" +
                                 std::to_string(config.bands)));
  return e;
}

Extractor Extractor::from_table(std::shared_ptr<const FeatureTable> table) {
  Extractor e;
  e.kind_ = ExtractorKind::external_file;
  e.dim_ = table->dim();
  e.fingerprint_ = table->fingerprint();
  e.table_ = std::move(table);
  return e;
}

Extractor Extractor::from_file(const std::filesystem::path& path) {
  auto table = std::make_shared<FeatureTable>(read_features(path));
  if (table->fingerprint().empty()) {
    std::ifstream f(path, std::ios::binary);
    const std::string bytes(std::istreambuf_iterator<char>(f), {});
    FeatureTable named("file-" + hex64(fnv1a64(bytes)), table->dim());
    for (const auto& r : table->records()) named.add(r.id, r.values);
    table = std::make_shared<FeatureTable>(std::move(named));
  }
  return from_table(std::move(table));
}

FeatureVector Extractor::embed(const ImageBuffer& img, std::string_view id) const {
  if (kind_ == ExtractorKind::external_file) {
    FeatureVector v = table_->vector(id);
    if (v.dim() != dim_) throw FingerprintError("feature row '" + std::string(id) + "' has the wrong dim");
    return v;
  }
  return {builtin_features(img, config_), fingerprint_};
}

FeatureVector embed_image(const Extractor& extractor, const ImageBuffer& img, std::string_view id) {
  return extractor.embed(img, id);
}

EmbeddedSubset::EmbeddedSubset(const Extractor& extractor, const ImageSubset& subset)
    : extractor_(&extractor), subset_(&subset), clean_(subset.size()), subset_id_(subset.fingerprint()) {
  detail::parallel_for(subset.size(),
                       [&](std::size_t i) { clean_[i] = extractor.embed(subset.images[i], subset.ids[i]); });
}

FeatureVector mean_difference(const EmbeddedSubset& subset, std::span<const FeatureVector> transformed) {
  if (transformed.empty()) throw DomainError("featurization needs a nonempty image subset");
  if (transformed.size() != subset.subset().size()) throw DomainError("one transformed feature per image expected");
  FeatureVector acc{std::vector<double>(transformed[0].dim(), 0.0), subset.extractor().fingerprint()};
  for (std::size_t i = 0; i < transformed.size(); ++i) {
    check_compatible(transformed[i], subset.clean(i));
    for (std::size_t d = 0; d < acc.values.size(); ++d) acc.values[d] += transformed[i].values[d] - subset.clean(i).values[d];
  }
  for (auto& v : acc.values) v /= static_cast<double>(transformed.size());
  return acc;
}

namespace {

bool is_file(const EmbeddedSubset& s) { return s.extractor().kind() == ExtractorKind::external_file; }

// Embeds `make(i)` for every image i of the subset, in parallel.
template <class Make>
std::vector<FeatureVector> embed_all(const EmbeddedSubset& s, std::string_view prefix, Make make) {
  const auto& subset = s.subset();
  std::vector<FeatureVector> out(subset.size());
  detail::parallel_for(subset.size(), [&](std::size_t i) {
    if (is_file(s)) {
      out[i] = prefix.empty() ? s.clean(i) : s.extractor().embed({}, std::string(prefix) + "/" + subset.ids[i]);
    } else {
      out[i] = s.extractor().embed(make(i), subset.ids[i]);
    }
  });
  return out;
}

TransformFeature wrap(const EmbeddedSubset& s, std::string id, FeatureVector f) {
  return {std::move(id), std::move(f), s.subset_id(), s.extractor().fingerprint()};
}

}  // namespace

TransformFeature featurize_transform(const EmbeddedSubset& s, const TransformSpec& t, const Registry& registry) {
  if (s.subset().empty()) throw DomainError("featurization needs a nonempty image subset");
  if (t.name != "identity") registry.resolve(t);
  const std::string prefix = t.name == "identity" ? "" : t.key();
  const auto outs = embed_all(s, prefix, [&](std::size_t i) {
    TransformSpec per_image = t;
    per_image.seed = image_seed(t.seed, s.subset().ids[i]);
    return registry.apply(per_image, s.subset().images[i]);
  });
  return wrap(s, t.key(), mean_difference(s, outs));
}

TransformFeature featurize_transform(const EmbeddedSubset& s, const SampledAugmentation& a, std::string_view label,
                                     const Registry& registry) {
  if (s.subset().empty()) throw DomainError("featurization needs a nonempty image subset");
  const auto outs = embed_all(s, a.is_identity() ? "" : label,
                              [&](std::size_t i) { return apply_augmentation(a, s.subset().images[i], registry); });
  return wrap(s, std::string(label), mean_difference(s, outs));
}

TransformFeature featurize_transform(const Extractor& extractor, const TransformSpec& t, const ImageSubset& subset) {
  return featurize_transform(EmbeddedSubset(extractor, subset), t);
}

TransformFeature featurize_transform(const Extractor& extractor, const SampledAugmentation& a, std::string_view label,
                                     const ImageSubset& subset) {
  return featurize_transform(EmbeddedSubset(extractor, subset), a, label);
}

FeatureVector corruption_center(const EmbeddedSubset& s, std::string_view corruption, int severity,
                                CenterOptions options, Seed seed, const Registry& registry) {
  if (options.n_samples < 1) throw DomainError("corruption center needs n_samples >= 1");
  const auto& subset = s.subset();
  if (subset.empty()) throw DomainError("featurization needs a nonempty image subset");
  const auto& entry = registry.find(corruption);
  if (entry.kind == TransformKind::augmentation) throw RegistryError(std::string(corruption) + " is not a corruption");
  TransformSpec base{std::string(corruption), {}, severity, seed};
  registry.resolve(base);

  const std::size_t n = options.n_samples;
  const std::size_t per_draw = options.paired ? 1 : subset.size();
  const std::string prefix = base.key();
  // Flattened (draw, image) jobs so a single draw still uses every worker.
  std::vector<FeatureVector> diffs(n * per_draw);
  detail::parallel_for(diffs.size(), [&](std::size_t j) {
    const std::size_t k = j / per_draw;
    const std::size_t i = options.paired ? k % subset.size() : j % per_draw;
    FeatureVector f;
    if (is_file(s)) {
      f = s.extractor().embed({}, prefix + "/" + subset.ids[i]);
    } else {
      TransformSpec t = base;
      t.seed = image_seed(corruption_draw_seed(seed, k), subset.ids[i]);
      f = s.extractor().embed(registry.apply(t, subset.images[i]), subset.ids[i]);
    }
    check_compatible(f, s.clean(i));
    for (std::size_t d = 0; d < f.values.size(); ++d) f.values[d] -= s.clean(i).values[d];
    diffs[j] = std::move(f);
  });

  // Same accumulation order as featurize_transform, per draw, then across draws.
  FeatureVector center{std::vector<double>(s.extractor().dim(), 0.0), s.extractor().fingerprint()};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> draw(center.dim(), 0.0);
    for (std::size_t i = 0; i < per_draw; ++i) {
      const auto& f = diffs[k * per_draw + i].values;
      for (std::size_t d = 0; d < draw.size(); ++d) draw[d] += f[d];
    }
    for (std::size_t d = 0; d < draw.size(); ++d) center.values[d] += draw[d] / static_cast<double>(per_draw);
  }
  for (auto& v : center.values) v /= static_cast<double>(n);
  return center;
}

}  // namespace augdist
