#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "augdist/augmix.hpp"
#include "augdist/dataset.hpp"
#include "augdist/errors.hpp"
#include "augdist/render.hpp"
#include "augdist/transforms.hpp"
#include "helpers.hpp"

using namespace augdist;
using augdist::testing::TempDir;

namespace {

std::size_t count_kind(TransformKind kind) {
  std::size_t n = 0;
  for (const auto& e : registry_list()) n += e.kind == kind;
  return n;
}

double table_value(const std::string& corruption, const std::string& param, int severity) {
  return Registry::builtin().severity_table().at(corruption).at(param).at(static_cast<std::size_t>(severity - 1));
}

}  // namespace

TEST(Registry, Counts) {
  EXPECT_EQ(count_kind(TransformKind::augmentation), 9u);
  EXPECT_EQ(count_kind(TransformKind::corruption_reference), 15u);
  EXPECT_EQ(count_kind(TransformKind::corruption_cbar), 15u);
}

TEST(Registry, SeverityRanges) {
  for (const auto& e : registry_list()) {
    if (e.kind == TransformKind::corruption_reference) {
      EXPECT_EQ(e.min_severity, 1);
      EXPECT_EQ(e.max_severity, 5) << e.name;
    } else if (e.kind == TransformKind::corruption_cbar) {
      EXPECT_EQ(e.max_severity, 10) << e.name;
    }
  }
}

TEST(Registry, Errors) {
  const ImageBuffer img(4, 4, 0.5f);
  EXPECT_THROW(apply_transform({"no_such_thing", {}, 1, Seed{}}, img), RegistryError);
  EXPECT_THROW(apply_transform({"gaussian_noise", {}, 6, Seed{}}, img), DomainError);
  EXPECT_THROW(apply_transform({"gaussian_noise", {}, 0, Seed{}}, img), DomainError);
  EXPECT_THROW(apply_transform({"gaussian_noise", {{"sigma", -1.0}}, 1, Seed{}}, img), DomainError);
}

TEST(Registry, IdentityReturnsInput) {
  const auto img = synthetic_image(9, 9, Seed{1});
  EXPECT_EQ(apply_transform({"identity", {}, std::nullopt, Seed{3}}, img), img);
}

TEST(Registry, SeverityConfigOverride) {
  auto reg = Registry::with_severity_config("[gaussian_noise]\nsigma = 0 0 0 0 0\n");
  const auto img = synthetic_image(8, 8, Seed{2});
  EXPECT_EQ(reg.apply({"gaussian_noise", {}, 3, Seed{1}}, img), img);
  EXPECT_THROW(Registry::with_severity_config("[gaussian_noise]\nsigma = 0.1 0.2\n"), Error);
  EXPECT_THROW(Registry::with_severity_config("[not_a_corruption]\nx = 1\n"), Error);
}

TEST(Transforms, ParseSpec) {
  const auto a = parse_transform_spec("fog:3", Seed{5});
  EXPECT_EQ(a.name, "fog");
  EXPECT_EQ(a.severity, 3);
  EXPECT_EQ(a.key(), "fog/3");
  const auto b = parse_transform_spec("rotate::degrees=10", Seed{5});
  EXPECT_FALSE(b.severity);
  EXPECT_DOUBLE_EQ(b.params.at("degrees"), 10.0);
  EXPECT_EQ(b.key(), "rotate");
  EXPECT_THROW(parse_transform_spec("fog:x", Seed{}), Error);
}

TEST(Transforms, GaussianNoiseMeanAbsoluteDeviation) {
  // Unclipped additive noise on mid gray: E|N(0, s^2)| = s * sqrt(2 / pi).
  const ImageBuffer gray(224, 224, 0.5f);
  for (int s : {1, 2}) {
    const double sigma = table_value("gaussian_noise", "sigma", s);
    const auto out = apply_transform({"gaussian_noise", {}, s, Seed{17}}, gray);
    const double expected = sigma * std::sqrt(2.0 / M_PI);
    EXPECT_NEAR(mean_abs_diff(out, gray) / expected, 1.0, 0.02) << "severity " << s;
  }
}

TEST(Transforms, CheckerboardOccludesConfiguredFraction) {
  const ImageBuffer gray(40, 50, 0.5f);
  for (int s = 1; s <= 10; ++s) {
    const double p = table_value("checkerboard", "fraction", s);
    const auto out = apply_transform({"checkerboard", {}, s, Seed{static_cast<std::uint64_t>(s)}}, gray);
    std::size_t changed = 0;
    for (int y = 0; y < 40; ++y) {
      for (int x = 0; x < 50; ++x) changed += out.at(y, x, 0) != gray.at(y, x, 0);
    }
    EXPECT_EQ(changed, static_cast<std::size_t>(std::lround(p * 2000))) << "severity " << s;
  }
}

TEST(Transforms, SeededRunsAreBitIdentical) {
  const auto img = synthetic_image(24, 20, Seed{3});
  for (const auto& e : registry_list()) {
    if (e.kind == TransformKind::augmentation) continue;
    TransformSpec t{e.name, {}, e.max_severity, Seed{77}};
    EXPECT_EQ(apply_transform(t, img), apply_transform(t, img)) << e.name;
  }
}

TEST(Transforms, NoiseDependsOnSeed) {
  const auto img = synthetic_image(16, 16, Seed{3});
  EXPECT_NE(apply_transform({"gaussian_noise", {}, 3, Seed{1}}, img),
            apply_transform({"gaussian_noise", {}, 3, Seed{2}}, img));
}

TEST(Transforms, JpegQualityOrdersDistortion) {
  const auto img = synthetic_image(32, 32, Seed{6});
  const double lo = mean_abs_diff(jpeg_roundtrip(img, 10), img);
  const double hi = mean_abs_diff(jpeg_roundtrip(img, 90), img);
  EXPECT_GT(lo, 1.5 * hi);
  EXPECT_GT(hi, 0.0);
  EXPECT_EQ(jpeg_roundtrip(img, 50), jpeg_roundtrip(img, 50));
}

TEST(Augmix, PowersetShape) {
  const auto schemes = enumerate_powerset();
  ASSERT_EQ(schemes.size(), 512u);
  EXPECT_TRUE(schemes[0].base_ops.empty());
  EXPECT_EQ(schemes[511].base_ops.size(), 9u);
  std::set<std::string> labels;
  for (const auto& s : schemes) labels.insert(s.label());
  EXPECT_EQ(labels.size(), 512u);
  for (const auto& name : base_augmentation_names()) {
    std::size_t n = 0;
    for (const auto& s : schemes) n += std::count(s.base_ops.begin(), s.base_ops.end(), std::string(name));
    EXPECT_EQ(n, 256u) << name;
  }
}

TEST(Augmix, EmptySchemeIsIdentity) {
  const auto a = sample_augmentation(AugmentationScheme{}, Seed{1});
  EXPECT_TRUE(a.is_identity());
  EXPECT_EQ(a.skip_weight, 1.0);
  const auto img = synthetic_image(8, 8, Seed{1});
  EXPECT_EQ(apply_augmentation(a, img), img);
}

TEST(Augmix, SingleOpSingleChain) {
  AugmentationScheme s;
  s.base_ops = {"rotate"};
  s.width = 1;
  s.depth = 1;
  const auto a = sample_augmentation(s, Seed{4});
  ASSERT_EQ(a.branches.size(), 1u);
  ASSERT_EQ(a.branches[0].size(), 1u);
  EXPECT_EQ(a.branches[0][0].name, "rotate");
  ASSERT_EQ(a.weights.size(), 1u);
  EXPECT_EQ(a.weights[0], 1.0);
}

TEST(Augmix, OpFrequencyInChains) {
  AugmentationScheme s;
  s.base_ops = {"solarize", "shear_x"};
  std::size_t chains = 0, with_solarize = 0, with_shear = 0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const auto a = sample_augmentation(s, derive(Seed{1}, "draw", i));
    for (const auto& chain : a.branches) {
      ++chains;
      bool sol = false, sh = false;
      for (const auto& t : chain) {
        sol |= t.name == "solarize";
        sh |= t.name == "shear_x";
      }
      with_solarize += sol;
      with_shear += sh;
    }
  }
  EXPECT_GE(static_cast<double>(with_solarize) / chains, 0.45);
  EXPECT_GE(static_cast<double>(with_shear) / chains, 0.45);
}

TEST(Augmix, SampleIsPureInSeed) {
  const auto schemes = enumerate_powerset();
  const auto img = synthetic_image(16, 16, Seed{2});
  const auto a = sample_augmentation(schemes[300], Seed{9});
  const auto b = sample_augmentation(schemes[300], Seed{9});
  EXPECT_EQ(apply_augmentation(a, img), apply_augmentation(b, img));
  EXPECT_TRUE(apply_augmentation(a, img).valid());
}

TEST(Augmix, MixtureIsLinearBeforeClamping) {
  const auto img = synthetic_image(12, 12, Seed{5});
  const TransformSpec ts[] = {{"identity", {}, std::nullopt, Seed{}}, {"contrast", {}, 2, Seed{}}};
  const double w[] = {0.25, 0.75};
  const auto mixed = mix_transforms(ts, w, img);
  const auto c = apply_transform(ts[1], img);
  for (std::size_t i = 0; i < img.size(); ++i) {
    EXPECT_NEAR(mixed.data()[i], 0.25 * img.data()[i] + 0.75 * c.data()[i], 1e-6);
  }
}

class RenderTest : public ::testing::Test {
protected:
  void SetUp() override { write_pool(synthetic_pool(2, 16, 16, Seed{8}), in.path()); }
  TempDir in, out;
};

TEST_F(RenderTest, OneSpecOneImage) {
  TempDir single;
  write_pool(synthetic_pool(1, 8, 8, Seed{1}), single.path());
  const TransformSpec specs[] = {{"fog", {}, 2, Seed{}}};
  const auto m = render_dataset(single.path(), specs, out.path(), Seed{1});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(out.path() / m[0].file));
  EXPECT_EQ(m[0].file, "fog/2/synthetic/00000.png");
}

TEST_F(RenderTest, CountsAndDeterminism) {
  std::vector<TransformSpec> specs;
  for (const auto& n : Registry::builtin().names(TransformKind::corruption_reference)) {
    for (int s = 1; s <= 5; ++s) specs.push_back({n, {}, s, Seed{}});
  }
  const auto m = render_dataset(in.path(), specs, out.path(), Seed{3});
  EXPECT_EQ(m.size(), 150u);
  TempDir again;
  const auto m2 = render_dataset(in.path(), specs, again.path(), Seed{3});
  ASSERT_EQ(m2.size(), m.size());
  for (std::size_t i = 0; i < m.size(); i += 7) {
    EXPECT_EQ(m[i].seed, m2[i].seed);
    EXPECT_EQ(load_image(out.path() / m[i].file), load_image(again.path() / m[i].file)) << m[i].file;
  }
  std::ifstream manifest(out.path() / "manifest.tsv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(manifest, line)) ++lines;
  EXPECT_EQ(lines, 151u);
}

TEST_F(RenderTest, SeedFollowsSpecAndImage) {
  const TransformSpec specs[] = {{"gaussian_noise", {}, 1, Seed{}}};
  const auto m = render_dataset(in.path(), specs, out.path(), Seed{3});
  EXPECT_EQ(m[0].seed, image_seed(render_spec_seed(Seed{3}, specs[0]), "synthetic/00000.png"));
}

TEST_F(RenderTest, DuplicateKeysRejected) {
  const TransformSpec specs[] = {{"fog", {}, 2, Seed{}}, {"fog", {}, 2, Seed{1}}};
  EXPECT_THROW(render_dataset(in.path(), specs, out.path(), Seed{1}), ConfigError);
}
