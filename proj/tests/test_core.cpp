#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "augdist/dataset.hpp"
#include "augdist/errors.hpp"
#include "augdist/image.hpp"
#include "augdist/rng.hpp"
#include "helpers.hpp"

using namespace augdist;
using augdist::testing::TempDir;

TEST(Rng, DeriveIsPureAndSeparatesPurposes) {
  const Seed s{42};
  EXPECT_EQ(derive(s, "a", 1), derive(s, "a", 1));
  EXPECT_NE(derive(s, "a", 1), derive(s, "a", 2));
  EXPECT_NE(derive(s, "a", 1), derive(s, "b", 1));
  static_assert(fnv1a64("") == 0xCBF29CE484222325ULL);
  static_assert(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
}

TEST(Rng, SplitMixFirstOutputs) {
  // Reference values of SplitMix64 seeded with 0.
  Rng rng(Seed{0});
  EXPECT_EQ(rng.next_u64(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(rng.next_u64(), 0x6E789E6AA1B965F4ULL);
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng rng(Seed{7});
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, NormalMoments) {
  Rng rng(Seed{3});
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Rng, PoissonMean) {
  Rng rng(Seed{5});
  for (double mean : {0.5, 4.0, 30.0, 300.0}) {
    double sum = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.poisson(mean));
    EXPECT_NEAR(sum / n / mean, 1.0, 0.03) << mean;
  }
}

TEST(Rng, DirichletSumsToOne) {
  Rng rng(Seed{9});
  for (int i = 0; i < 100; ++i) {
    const auto w = rng.dirichlet(1.0, 3);
    double s = 0;
    for (double x : w) {
      EXPECT_GE(x, 0.0);
      s += x;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Rng, SampleIndicesDistinct) {
  Rng rng(Seed{11});
  const auto idx = rng.sample_indices(50, 20);
  EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), 20u);
  for (auto i : idx) EXPECT_LT(i, 50u);
}

TEST(Image, QuantizeRoundsHalfUp) {
  EXPECT_EQ(quantize(0.0f), 0);
  EXPECT_EQ(quantize(1.0f), 255);
  EXPECT_EQ(quantize(-0.5f), 0);
  EXPECT_EQ(quantize(2.0f), 255);
  for (int q = 0; q < 256; ++q) EXPECT_EQ(quantize(dequantize(static_cast<std::uint8_t>(q))), q);
}

TEST(Image, RedPixelLoadsAsUnitRed) {
  TempDir dir;
  ImageBuffer img(2, 2);
  img.at(1, 0, 0) = 1.0f;
  save_image(img, dir / "red.png");
  const auto back = load_image(dir / "red.png");
  EXPECT_EQ(back.height(), 2);
  EXPECT_EQ(back.width(), 2);
  EXPECT_EQ(back.at(1, 0, 0), 1.0f);
  EXPECT_EQ(back.at(1, 0, 1), 0.0f);
  EXPECT_EQ(back.at(0, 0, 0), 0.0f);
}

TEST(Image, BlackPngIsZero) {
  TempDir dir;
  save_image(ImageBuffer(5, 3), dir / "black.png");
  const auto back = load_image(dir / "black.png");
  for (float v : back.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Image, RoundTripOfRandomEightBitImages) {
  TempDir dir;
  Rng rng(Seed{1});
  for (int k = 0; k < 5; ++k) {
    ImageBuffer img(7 + k, 11);
    for (auto& v : img.data()) v = dequantize(static_cast<std::uint8_t>(rng.below(256)));
    save_image(img, dir / "x.png");
    const auto once = load_image(dir / "x.png");
    EXPECT_EQ(once, img);
    save_image(once, dir / "y.png");
    EXPECT_EQ(load_image(dir / "y.png"), once);
  }
}

TEST(Image, LoadErrors) {
  TempDir dir;
  EXPECT_THROW(load_image(dir / "missing.png"), IoError);
  std::ofstream(dir / "junk.png") << "not a png";
  EXPECT_THROW(load_image(dir / "junk.png"), Error);
}

TEST(Image, WeightedSumAccumulatesInOrder) {
  ImageBuffer a(1, 1, 0.25f), b(1, 1, 0.5f);
  const ImageBuffer imgs[] = {a, b};
  const double w[] = {2.0, 1.0};
  EXPECT_FLOAT_EQ(weighted_sum(imgs, w).at(0, 0, 2), 1.0f);
}

class DatasetTest : public ::testing::Test {
protected:
  void SetUp() override {
    pool = synthetic_pool(12, 8, 8, Seed{4});
    write_pool(pool, dir.path());
  }
  TempDir dir;
  ImageSubset pool;
};

TEST_F(DatasetTest, ListingIsSortedRelativePaths) {
  const auto ids = list_images(dir.path());
  ASSERT_EQ(ids.size(), 12u);
  EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
  EXPECT_EQ(ids.front(), "synthetic/00000.png");
}

TEST_F(DatasetTest, EmptySubset) { EXPECT_TRUE(sample_subset(dir.path(), 0, Seed{1}).empty()); }

TEST_F(DatasetTest, SubsetIsDeterministic) {
  const auto a = sample_subset(dir.path(), 5, Seed{8});
  const auto b = sample_subset(dir.path(), 5, Seed{8});
  EXPECT_EQ(a.ids, b.ids);
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_TRUE(std::is_sorted(a.ids.begin(), a.ids.end()));
}

TEST_F(DatasetTest, SubsetMembershipFollowsPartialShuffle) {
  // Oracle: replay the documented generator by hand.
  const auto ids = list_images(dir.path());
  Rng rng(derive(Seed{8}, "subset"));
  auto picks = rng.sample_indices(ids.size(), 5);
  std::vector<std::string> expected;
  for (auto i : picks) expected.push_back(ids[i]);
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(sample_subset(dir.path(), 5, Seed{8}).ids, expected);
}

TEST_F(DatasetTest, FullSubsetIsCanonicalListing) {
  EXPECT_EQ(sample_subset(dir.path(), 12, Seed{99}).ids, list_images(dir.path()));
}

TEST_F(DatasetTest, PixelsSurviveDisk) {
  const auto all = load_all(dir.path());
  ASSERT_EQ(all.size(), pool.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t k = 0; k < all.images[i].size(); ++k) {
      EXPECT_NEAR(all.images[i].data()[k], pool.images[i].data()[k], 0.5 / 255 + 1e-6);
    }
  }
}

TEST_F(DatasetTest, TooFewImages) { EXPECT_THROW(sample_subset(dir.path(), 13, Seed{1}), SizeError); }

TEST(Dataset, InMemoryPoolMatchesDirectorySelection) {
  TempDir dir;
  const auto pool = synthetic_pool(9, 4, 4, Seed{2});
  write_pool(pool, dir.path());
  EXPECT_EQ(sample_subset(pool, 4, Seed{3}).ids, sample_subset(dir.path(), 4, Seed{3}).ids);
}
