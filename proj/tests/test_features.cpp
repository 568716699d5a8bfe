#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "augdist/dataset.hpp"
#include "augdist/distances.hpp"
#include "augdist/errors.hpp"
#include "augdist/feature_io.hpp"
#include "augdist/features.hpp"
#include "helpers.hpp"

using namespace augdist;
using augdist::testing::TempDir;

namespace {

const TransformSpec kIdentity{"identity", {}, std::nullopt, Seed{}};

}  // namespace

TEST(Builtin, Dimension) {
  EXPECT_EQ(Extractor::builtin().dim(), 78u);
  EXPECT_EQ(embed_image(Extractor::builtin(), ImageBuffer(16, 16)).dim(), 78u);
  EXPECT_EQ((BuiltinConfig{4, 3}.dim()), 25u);
}

TEST(Builtin, ZeroImageEmbedsToZero) {
  for (double v : embed_image(Extractor::builtin(), ImageBuffer(20, 24)).values) EXPECT_EQ(v, 0.0);
}

TEST(Builtin, ConstantImageHasOnlyMeans) {
  ImageBuffer img(16, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      img.at(y, x, 0) = 0.2f;
      img.at(y, x, 1) = 0.4f;
      img.at(y, x, 2) = 0.6f;
    }
  }
  const auto v = embed_image(Extractor::builtin(), img).values;
  const double lum = 0.299 * 0.2f + 0.587 * 0.4f + 0.114 * 0.6f;
  for (int i = 0; i < 64; ++i) EXPECT_NEAR(v[i], lum, 1e-6);
  EXPECT_NEAR(v[64], 0.2, 1e-6);
  EXPECT_NEAR(v[65], 0.4, 1e-6);
  EXPECT_NEAR(v[66], 0.6, 1e-6);
  for (int i = 67; i < 78; ++i) EXPECT_NEAR(v[i], 0.0, 1e-9);
}

TEST(Builtin, SinusoidLandsInOneBand) {
  // A horizontal cosine at 1/4 of the sampling rate sits at normalized radius 0.5.
  ImageBuffer img(32, 32);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = static_cast<float>(0.5 + 0.25 * std::cos(M_PI * x / 2.0));
    }
  }
  const auto v = embed_image(Extractor::builtin(), img).values;
  int hot = 0;
  for (int b = 70; b < 78; ++b) hot += v[b] > 1e-3;
  EXPECT_EQ(hot, 1);
}

TEST(Builtin, FingerprintIsStable) {
  EXPECT_EQ(Extractor::builtin().fingerprint(), Extractor::builtin().fingerprint());
  EXPECT_NE(Extractor::builtin().fingerprint(), Extractor::builtin({4, 4}).fingerprint());
  const auto img = synthetic_image(12, 12, Seed{1});
  EXPECT_EQ(embed_image(Extractor::builtin(), img), embed_image(Extractor::builtin(), img));
}

class FeaturizeTest : public ::testing::Test {
protected:
  ImageSubset subset = synthetic_pool(12, 24, 24, Seed{5});
  Extractor ex = Extractor::builtin();
};

TEST_F(FeaturizeTest, IdentityIsZero) {
  const auto f = featurize_transform(ex, kIdentity, subset);
  for (double v : f.feature.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(f.fingerprint, ex.fingerprint());
  EXPECT_EQ(f.subset_id, subset.fingerprint());
}

TEST_F(FeaturizeTest, SingleImageIsItsDifference) {
  ImageSubset one = sample_subset(subset, 1, Seed{2});
  const TransformSpec t{"fog", {}, 3, Seed{4}};
  const auto f = featurize_transform(ex, t, one);
  TransformSpec per_image = t;
  per_image.seed = image_seed(t.seed, one.ids[0]);
  const auto after = embed_image(ex, apply_transform(per_image, one.images[0]));
  const auto before = embed_image(ex, one.images[0]);
  for (std::size_t d = 0; d < f.feature.dim(); ++d) EXPECT_EQ(f.feature.values[d], after.values[d] - before.values[d]);
}

TEST_F(FeaturizeTest, ConstantOutputTransform) {
  // Blackening every pixel maps all inputs to the same image.
  const TransformSpec black{"checkerboard", {{"fraction", 1.0}}, 1, Seed{}};
  const auto f = featurize_transform(ex, black, subset);
  const auto x0 = embed_image(ex, ImageBuffer(24, 24));
  std::vector<double> mean(ex.dim(), 0.0);
  for (const auto& img : subset.images) {
    const auto e = embed_image(ex, img);
    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += e.values[d];
  }
  for (std::size_t d = 0; d < mean.size(); ++d) {
    EXPECT_NEAR(f.feature.values[d], x0.values[d] - mean[d] / subset.size(), 1e-12);
  }
}

TEST_F(FeaturizeTest, AugmentationOverload) {
  const auto aug = sample_augmentation(enumerate_powerset()[0], Seed{3});
  const auto f = featurize_transform(ex, aug, "powerset/000/0", subset);
  for (double v : f.feature.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(f.transform_id, "powerset/000/0");
}

TEST_F(FeaturizeTest, CenterWithOneDrawIsThatDraw) {
  const EmbeddedSubset emb(ex, subset);
  const auto c = corruption_center(emb, "gaussian_noise", 2, {1, false}, Seed{9});
  const auto f = featurize_transform(emb, {"gaussian_noise", {}, 2, corruption_draw_seed(Seed{9}, 0)});
  EXPECT_EQ(c.values, f.feature.values);
}

TEST_F(FeaturizeTest, DeterministicCorruptionCenterIgnoresDraws) {
  const EmbeddedSubset emb(ex, subset);
  const auto f = featurize_transform(emb, {"contrast", {}, 3, Seed{}}).feature;
  for (std::size_t n : {1u, 3u, 8u}) {
    const auto c = corruption_center(emb, "contrast", 3, {n, false}, Seed{1});
    for (std::size_t d = 0; d < f.dim(); ++d) EXPECT_NEAR(c.values[d], f.values[d], 1e-12);
  }
}

TEST_F(FeaturizeTest, CenterIsMeanOfDraws) {
  const EmbeddedSubset emb(ex, subset);
  const auto c = corruption_center(emb, "shot_noise", 4, {5, false}, Seed{2});
  std::vector<double> sum(ex.dim(), 0.0);
  for (std::size_t k = 0; k < 5; ++k) {
    const auto f = featurize_transform(emb, {"shot_noise", {}, 4, corruption_draw_seed(Seed{2}, k)});
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += f.feature.values[d];
  }
  for (std::size_t d = 0; d < sum.size(); ++d) EXPECT_NEAR(c.values[d], sum[d] / 5, 1e-12);
}

TEST_F(FeaturizeTest, UnknownCorruption) {
  const EmbeddedSubset emb(ex, subset);
  EXPECT_THROW(corruption_center(emb, "nope", 1, {}, Seed{}), RegistryError);
}

TEST(FeatureFile, RoundTrip) {
  TempDir dir;
  FeatureTable t("fp-1", 3);
  t.add("a/1.png", {0.5, -2.0, 1e-3f});
  t.add("b/2.png", {0.0, 3.25, -7.0});
  write_features(dir / "f.cbf", t);
  const auto back = read_features(dir / "f.cbf");
  EXPECT_EQ(back.fingerprint(), "fp-1");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.records()[0].id, "a/1.png");
  EXPECT_EQ(back.records()[0].values, t.records()[0].values);
  EXPECT_EQ(back.vector("b/2.png").values, t.records()[1].values);
  EXPECT_EQ(std::filesystem::file_size(dir / "f.cbf"), feature_file_size(t));
}

TEST(FeatureFile, EmptyTable) {
  TempDir dir;
  write_features(dir / "e.cbf", FeatureTable("", 16));
  const auto back = read_features(dir / "e.cbf");
  EXPECT_EQ(back.size(), 0u);
  EXPECT_EQ(back.dim(), 16u);
}

TEST(FeatureFile, LargeFileSize) {
  TempDir dir;
  const std::size_t n = 10000, dim = 2048;
  FeatureTable t("", dim);
  std::vector<double> row(dim, 0.25);
  std::size_t id_bytes = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::string id = std::to_string(i);
    id_bytes += 4 + id.size();
    t.add(std::move(id), row);
  }
  const std::size_t header = 4 + 4 + 8 + 4;
  EXPECT_EQ(feature_file_size(t), header + id_bytes + n * dim * 4);
  write_features(dir / "big.cbf", t);
  EXPECT_EQ(std::filesystem::file_size(dir / "big.cbf"), header + id_bytes + n * dim * 4);
}

TEST(FeatureFile, Rejections) {
  TempDir dir;
  EXPECT_THROW(read_features(dir / "missing.cbf"), IoError);
  std::ofstream(dir / "bad.cbf") << "CBF2xxxxxxxxxxxxxxxxxxx";
  EXPECT_THROW(read_features(dir / "bad.cbf"), FormatError);
  FeatureTable t("fp", 2);
  t.add("x", {1.0, 2.0});
  write_features(dir / "ok.cbf", t);
  EXPECT_THROW(read_features(dir / "ok.cbf", 3), FormatError);
  std::filesystem::resize_file(dir / "ok.cbf", std::filesystem::file_size(dir / "ok.cbf") - 1);
  EXPECT_THROW(read_features(dir / "ok.cbf"), FormatError);
  EXPECT_THROW(t.add("x", {0.0, 0.0}), FormatError);
  EXPECT_THROW(t.add("y", {0.0}), FormatError);
  EXPECT_THROW(t.vector("z"), LookupError);
}

TEST(FileExtractor, LooksUpRenderedIds) {
  TempDir dir;
  const auto subset = synthetic_pool(3, 8, 8, Seed{1});
  FeatureTable t("net-a", 2);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    t.add(subset.ids[i], {static_cast<double>(i), 0.0});
    t.add("fog/2/" + subset.ids[i], {static_cast<double>(i) + 1.0, 2.0});
  }
  write_features(dir / "f.cbf", t);
  const auto ex = Extractor::from_file(dir / "f.cbf");
  EXPECT_EQ(ex.kind(), ExtractorKind::external_file);
  EXPECT_EQ(ex.fingerprint(), "net-a");
  const auto f = featurize_transform(ex, {"fog", {}, 2, Seed{}}, subset);
  EXPECT_EQ(f.feature.values, (std::vector<double>{1.0, 2.0}));
  EXPECT_THROW(featurize_transform(ex, {"fog", {}, 3, Seed{}}, subset), LookupError);
}

TEST(FileExtractor, FingerprintsNeverMix) {
  SampleSet s(2, "net-a");
  EXPECT_THROW(s.add(FeatureVector{{1.0, 2.0}, "net-b"}), FingerprintError);
  EXPECT_THROW(s.add(FeatureVector{{1.0}, "net-a"}), FingerprintError);
  EXPECT_THROW(check_compatible(FeatureVector{{1.0}, "a"}, FeatureVector{{1.0}, "b"}), FingerprintError);
}
