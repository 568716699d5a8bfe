#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "augdist/dataset.hpp"
#include "augdist/feature_io.hpp"
#include "cli.hpp"
#include "helpers.hpp"
#include "planted.hpp"

using namespace augdist;
using augdist::testing::TempDir;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "augdist");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::size_t count_files(const std::filesystem::path& dir) {
  std::size_t n = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) n += e.path().extension() == ".png";
  return n;
}

std::vector<std::vector<std::string>> rows(const std::string& table) {
  std::vector<std::vector<std::string>> out;
  std::stringstream ss(table);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, '\t')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

// Scheme k has samples at distance 1 + k from both fog centers.
void write_scheme_features(const std::filesystem::path& path) {
  FeatureTable t("synthetic", 2);
  t.add("fog/1", {0.0, 0.0});
  t.add("fog/2", {0.0, 0.0});
  t.add("frost/1", {100.0, 0.0});
  for (int k = 0; k < 6; ++k) {
    const std::string label = "powerset/00" + std::to_string(k);
    t.add(label + "/0", {0.0, 1.0 + k});
    t.add(label + "/1", {0.0, 20.0 + k});
    t.add(label + "/2", {100.0, 3.0 + 0.5 * k});
  }
  write_features(path, t);
}

}  // namespace

TEST(Cli, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"mmd", "--a", (dir / "missing.cbf").string()}).code, 2);
  std::ofstream(dir / "bad.cbf") << "garbage";
  EXPECT_EQ(run({"mmd", "--a", (dir / "bad.cbf").string()}).code, 3);
  EXPECT_EQ(run({"subset", "--samples", (dir / "bad.cbf").string(), "--k", "1", "--mode", "median"}).code, 3);
  EXPECT_EQ(run({"toy-mix", "--alphas", "0.5,x"}).code, 2);
}

TEST(Cli, RenderCountsAndDeterminism) {
  TempDir in, a, b;
  write_pool(synthetic_pool(2, 16, 16, Seed{1}), in.path());
  const auto ra = run({"render", "--seed", "3", "--input", in.path().string(), "--output", a.path().string(),
                       "--corruptions", "reference", "--severities", "1-5"});
  ASSERT_EQ(ra.code, 0) << ra.err;
  EXPECT_EQ(count_files(a.path()), 150u);
  run({"render", "--seed", "3", "--input", in.path().string(), "--output", b.path().string()});
  EXPECT_EQ(slurp(a / "manifest.tsv"), slurp(b / "manifest.tsv"));
  EXPECT_EQ(slurp(a / "fog/3/synthetic/00001.png"), slurp(b / "fog/3/synthetic/00001.png"));
}

TEST(Cli, RenderNothingIsNoOp) {
  TempDir in, out;
  write_pool(synthetic_pool(1, 8, 8, Seed{1}), in.path());
  const auto r = run({"render", "--input", in.path().string(), "--output", (out / "x").string(), "--corruptions", "none"});
  EXPECT_EQ(r.code, 0);
  EXPECT_FALSE(std::filesystem::exists(out / "x"));
}

TEST(Cli, FeaturizeIdentityAndRerun) {
  TempDir dir;
  const std::vector<std::string> args = {"featurize", "--seed", "2", "--synthetic", "20", "--subset-size", "8",
                                         "--transform", "identity", "--transform", "fog:2", "--corruptions",
                                         "gaussian_noise", "--severities", "1-2", "--corruption-samples", "3",
                                         "--powerset", "--schemes", "0-2", "--aug-samples", "4", "--output"};
  auto a = args, b = args;
  a.push_back((dir / "a.cbf").string());
  b.push_back((dir / "b.cbf").string());
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  EXPECT_EQ(slurp(dir / "a.cbf"), slurp(dir / "b.cbf"));
  const auto t = read_features(dir / "a.cbf");
  EXPECT_EQ(t.size(), 2u + 2u + 3u * 4u);
  for (double v : t.vector("identity").values) EXPECT_EQ(v, 0.0);
  EXPECT_NE(t.find("gaussian_noise/2"), nullptr);
  EXPECT_NE(t.find("powerset/002/3"), nullptr);
}

TEST(Cli, MsdAndMmd) {
  TempDir dir;
  write_scheme_features(dir / "f.cbf");
  const auto r = run({"msd", "--samples", (dir / "f.cbf").string(), "--center", "fog/1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = rows(r.out);
  ASSERT_EQ(t.size(), 7u);
  EXPECT_EQ(t[0], (std::vector<std::string>{"scheme", "center", "msd", "mmd", "argmin", "count"}));
  EXPECT_EQ(t[1][0], "powerset/000");
  EXPECT_EQ(t[1][2], "1");
  EXPECT_EQ(t[1][4], "powerset/000/0");
  EXPECT_EQ(t[1][5], "3");
  const auto m = run({"mmd", "--a", (dir / "f.cbf").string(), "--a-prefix", "fog/", "--b-prefix", "frost/"});
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_EQ(rows(m.out)[1][2], "100");
}

TEST(Cli, CorrelateMonotoneAndAntitone) {
  TempDir dir;
  write_scheme_features(dir / "f.cbf");
  {
    std::ofstream e(dir / "errors.csv");
    e << "scheme,corruption,error\n";
    for (int k = 0; k < 6; ++k) {
      e << "powerset/00" << k << ",fog," << 10 + 3 * k << "\n";
      e << "powerset/00" << k << ",frost," << 50 - k << "\n";
    }
  }
  const auto r = run({"correlate", "--features", (dir / "f.cbf").string(), "--errors", (dir / "errors.csv").string(),
                      "--plot-data", (dir / "plot.tsv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = rows(r.out);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[1], (std::vector<std::string>{"fog", "6", "1"}));
  EXPECT_EQ(t[2], (std::vector<std::string>{"frost", "6", "-1"}));
  EXPECT_EQ(rows(slurp(dir / "plot.tsv")).size(), 13u);
}

TEST(Cli, RankAndSubset) {
  TempDir dir;
  write_scheme_features(dir / "f.cbf");
  const auto r = run({"rank-augs", "--samples", (dir / "f.cbf").string(), "--corruptions", "fog/1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = rows(r.out);
  ASSERT_EQ(t.size(), 19u);
  EXPECT_EQ(t[1][1], "powerset/000/0");
  const auto s = run({"subset", "--samples", (dir / "f.cbf").string(), "--corruptions", "fog", "--k", "2"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(rows(s.out).size(), 3u);
  EXPECT_EQ(run({"subset", "--samples", (dir / "f.cbf").string(), "--k", "99"}).code, 2);
}

TEST(Cli, VarianceProbe) {
  const auto r = run({"variance-probe", "--seed", "1", "--synthetic", "30", "--image-size", "16", "--corruption",
                      "gaussian_noise", "--subset-size", "10", "--corruption-samples", "3", "--repeats", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(rows(r.out).size(), 4u);
  EXPECT_NE(r.out.find("percent="), std::string::npos);
}

TEST(Cli, ToyMix) {
  const auto r = run({"toy-mix", "--seed", "1", "--samples", "2000", "--alphas", "0,0.5,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = rows(r.out);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_LT(std::stod(t[3][1]), 0.2);
  EXPECT_LT(std::stod(t[3][2]), 0.2);
  EXPECT_LT(std::stod(t[2][2]), 0.05 * std::stod(t[1][1]));
}

class CliBuild : public ::testing::Test {
protected:
  void SetUp() override {
    const auto p = augdist::testing::make_planted(Seed{3});
    planted = p.planted;
    std::ofstream(dir / "new.csv") << p.inputs.new_errors.to_text();
    std::ofstream(dir / "ref.csv") << p.inputs.reference_errors.to_text();
    FeatureTable t("planted", 8);
    for (const auto& [key, v] : p.inputs.new_centers) t.add(key.first + "/" + std::to_string(key.second), v);
    std::size_t i = 0;
    for (const auto& name : p.inputs.reference_errors.corruptions()) {
      for (int s = 1; s <= 5; ++s) t.add(name + "/" + std::to_string(s), p.inputs.reference_centers[i++]);
    }
    write_features(dir / "centers.cbf", t);
  }
  std::vector<std::string> args(const std::string& out) const {
    return {"build-benchmark", "--seed", "4", "--new-errors", (dir / "new.csv").string(), "--reference-errors",
            (dir / "ref.csv").string(), "--features", (dir / "centers.cbf").string(), "--candidates", "500",
            "--runs", "2", "--output", (dir / out).string()};
  }
  TempDir dir;
  std::set<std::string> planted;
};

TEST_F(CliBuild, RecoversPlantedTen) {
  const auto r = run(args("out"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = rows(slurp(dir / "out/benchmark.tsv"));
  ASSERT_EQ(t.size(), 11u);
  std::set<std::string> got;
  for (std::size_t i = 1; i < t.size(); ++i) {
    got.insert(t[i][0]);
    const int c = std::stoi(t[i][1]);
    EXPECT_EQ(t[i][2], std::to_string(c - 2) + "-" + std::to_string(c + 2));
  }
  EXPECT_EQ(got, planted);
  EXPECT_EQ(rows(slurp(dir / "out/ranking.tsv")).size(), 21u);
}

TEST_F(CliBuild, InfeasibleToleranceExitsFour) {
  std::ofstream(dir / "ref.csv") << "corruption,severity,error\nref0,1,99\nref0,2,99\nref0,3,99\nref0,4,99\nref0,5,99.5\n";
  auto a = args("out");
  a.insert(a.end(), {"--tolerance", "0.1", "--spread-target", "16"});
  const auto r = run(a);
  EXPECT_EQ(r.code, 4) << r.err;
}
