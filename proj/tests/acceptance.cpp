// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "augdist/augmix.hpp"
#include "augdist/benchmark_builder.hpp"
#include "augdist/dataset.hpp"
#include "augdist/distances.hpp"
#include "augdist/features.hpp"
#include "augdist/toy_mix.hpp"
#include "augdist/transforms.hpp"
#include "planted.hpp"

using namespace augdist;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---- independent oracles ----

double exhaustive_msd(const SampleSet& s, const FeatureVector& c) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    double acc = 0;
    for (std::size_t d = 0; d < s.dim(); ++d) {
      const double diff = s.row(i)[d] - c.values[d];
      acc += diff * diff;
    }
    if (acc < best) best = acc;
  }
  return std::sqrt(best);
}

std::vector<double> counted_ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double below = 0, same = 0;
    for (double y : x) {
      below += y < x[i];
      same += y == x[i];
    }
    r[i] = below + (same + 1) / 2;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n, mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

FeatureVector normal_vector(Rng& rng, std::size_t dim, double scale) {
  FeatureVector v{std::vector<double>(dim), "acceptance"};
  for (auto& x : v.values) x = rng.normal(0.0, scale);
  return v;
}

// ---- criteria ----

Outcome identity_is_zero() {
  const auto pool = synthetic_pool(300, 48, 40, Seed{101});
  const auto ex = Extractor::builtin();
  double worst = 0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto subset = sample_subset(pool, 100, Seed{s});
    const EmbeddedSubset emb(ex, subset);
    const auto f = featurize_transform(emb, TransformSpec{"identity", {}, std::nullopt, Seed{s}});
    const auto g = featurize_transform(emb, sample_augmentation(AugmentationScheme{}, Seed{s}), "powerset/000/0");
    for (double v : f.feature.values) worst = std::max(worst, std::fabs(v));
    for (double v : g.feature.values) worst = std::max(worst, std::fabs(v));
  }
  return {worst <= 1e-9, fmt("max |f(identity)| = %.3g over 3 subsets of 100", worst)};
}

Outcome msd_matches_scan() {
  Rng rng(Seed{202});
  std::size_t mismatches = 0, union_failures = 0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t dim = 1 + rng.below(64), n = 1 + rng.below(1000);
    SampleSet s(dim, "acceptance");
    for (std::size_t i = 0; i < n; ++i) s.add(normal_vector(rng, dim, 1.0));
    const auto c = normal_vector(rng, dim, 1.0);
    mismatches += msd(s, c) != exhaustive_msd(s, c);
  }
  for (int k = 0; k < 100; ++k) {
    const std::size_t dim = 1 + rng.below(64), n = 2 + rng.below(999);
    const std::size_t cut = 1 + rng.below(n - 1);
    SampleSet all(dim, "acceptance"), a(dim, "acceptance"), b(dim, "acceptance");
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = normal_vector(rng, dim, 1.0);
      all.add(v);
      (i < cut ? a : b).add(v);
    }
    const auto c = normal_vector(rng, dim, 1.0);
    const double u = msd(all, c);
    union_failures += u != std::min(msd(a, c), msd(b, c)) || u > msd(a, c) || u > msd(b, c);
  }
  return {mismatches == 0 && union_failures == 0,
          fmt("%zu/200 scan mismatches, %zu/100 union violations", mismatches, union_failures)};
}

Outcome mixture_toy() {
  ToyMixOptions o;
  o.samples = 10000;
  o.alphas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const auto rows = toy_mix(o, Seed{303});
  const double mmd0 = rows.front().mmd;
  const std::vector<ToyMixRow> swept(rows.begin() + 1, rows.end());
  const double r2 = analytic_r_squared(swept);
  double worst = 0;
  for (const auto& r : swept) worst = std::max(worst, r.msd / mmd0);
  return {r2 > 0.99 && worst < 0.05, fmt("R^2 = %.6f, max MSD/MMD(0) = %.4f", r2, worst)};
}

Outcome spearman_oracle() {
  Rng rng(Seed{404});
  double worst = 0;
  std::size_t checked = 0;
  while (checked < 500) {
    const std::size_t n = 3 + rng.below(60);
    const std::uint64_t levels_a = 2 + rng.below(10), levels_b = 2 + rng.below(10);
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = static_cast<double>(rng.below(levels_a));
    for (auto& x : b) x = static_cast<double>(rng.below(levels_b)) + 0.5 * static_cast<double>(rng.below(2));
    const auto ra = counted_ranks(a), rb = counted_ranks(b);
    const auto flat = [](const std::vector<double>& r) { return std::all_of(r.begin(), r.end(), [&](double v) { return v == r[0]; }); };
    if (flat(ra) || flat(rb)) continue;
    worst = std::max(worst, std::fabs(spearman(a, b) - pearson(ra, rb)));
    ++checked;
  }
  std::size_t variant = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 5 + rng.below(50);
    std::vector<double> a(n), b(n), fa(n), gb(n);
    for (auto& x : a) x = std::round(rng.normal() * 4) / 4;
    for (auto& x : b) x = rng.normal();
    std::transform(a.begin(), a.end(), fa.begin(), [](double x) { return std::exp(2 * x) + 3; });
    std::transform(b.begin(), b.end(), gb.begin(), [](double x) { return x * x * x - 10; });
    const double base = spearman(a, b);
    variant += std::fabs(spearman(fa, b) - base) > 1e-12 || std::fabs(spearman(a, gb) - base) > 1e-12 ||
               std::fabs(spearman(fa, gb) - base) > 1e-12;
  }
  return {worst < 1e-12 && variant == 0,
          fmt("max |rho - oracle| = %.3g over 500 tied cases, %zu/100 invariance failures", worst, variant)};
}

Outcome powerset_shape() {
  const auto schemes = enumerate_powerset();
  std::size_t off = 0;
  for (const auto& name : base_augmentation_names()) {
    std::size_t n = 0;
    for (const auto& s : schemes) n += std::count(s.base_ops.begin(), s.base_ops.end(), std::string(name));
    off += n != 256;
  }
  return {schemes.size() == 512 && off == 0, fmt("%zu schemes, %zu ops not in exactly 256", schemes.size(), off)};
}

Outcome determinism_and_range() {
  const auto images = synthetic_pool(20, 40, 56, Seed{606});
  const auto& reg = Registry::builtin();
  std::size_t runs = 0, bad = 0;
  std::string first_bad;
  auto check = [&](const TransformSpec& t, const ImageBuffer& img, const std::string& label) {
    const auto a = reg.apply(t, img), b = reg.apply(t, img);
    ++runs;
    if (!(a == b) || !a.valid() || !a.same_shape(img)) {
      if (bad++ == 0) first_bad = label;
    }
  };
  for (const auto& e : reg.list()) {
    for (std::size_t i = 0; i < images.size(); ++i) {
      const Seed seed = image_seed(Seed{7}, images.ids[i]);
      if (e.kind == TransformKind::augmentation) {
        for (double magnitude : {1.0, 3.0, 10.0}) {
          Rng rng(derive(seed, "op", static_cast<std::uint64_t>(magnitude)));
          TransformSpec t = sample_base_op(e.name, magnitude, rng);
          t.seed = seed;
          check(t, images.images[i], e.name);
        }
        continue;
      }
      for (int s = e.min_severity; s <= e.max_severity; ++s) check({e.name, {}, s, seed}, images.images[i], e.name);
    }
  }
  return {bad == 0, fmt("%zu seeded runs, %zu failures%s%s", runs, bad, bad ? ", first: " : "", first_bad.c_str())};
}

Outcome severity_monotonicity() {
  const auto images = synthetic_pool(100, 32, 32, Seed{707});
  const auto& reg = Registry::builtin();
  std::size_t corruptions = 0;
  std::vector<std::string> broken;
  for (const auto& e : reg.list()) {
    if (e.kind == TransformKind::augmentation) continue;
    ++corruptions;
    std::vector<double> l1;
    for (int s = e.min_severity; s <= e.max_severity; ++s) {
      double sum = 0;
      for (std::size_t i = 0; i < images.size(); ++i) {
        sum += mean_abs_diff(reg.apply({e.name, {}, s, image_seed(Seed{s + 0ULL}, images.ids[i])}, images.images[i]),
                             images.images[i]);
      }
      l1.push_back(sum / static_cast<double>(images.size()));
    }
    for (std::size_t k = 1; k < l1.size(); ++k) {
      if (!(l1[k] > l1[k - 1])) {
        broken.push_back(e.name + fmt("@%zu", k + 1));
        break;
      }
    }
  }
  std::string names;
  for (const auto& b : broken) names += " " + b;
  return {broken.empty(), fmt("%zu corruptions, %zu not strictly increasing%s", corruptions, broken.size(), names.c_str())};
}

Outcome planted_recovery() {
  std::size_t recovered = 0, violations = 0, candidates = 0;
  for (std::uint64_t r = 0; r < 10; ++r) {
    const auto p = augdist::testing::make_planted(Seed{800 + r});
    BuildOptions o;
    o.n_candidates = 1000;
    const auto result = build_benchmark(p.inputs, o, Seed{r});
    const auto names = result.benchmark.corruptions();
    recovered += std::set<std::string>(names.begin(), names.end()) == p.planted;

    const auto groups = form_severity_groups(p.inputs.new_errors, result.spread_target, o.band);
    SamplingOptions so;
    so.reference_avg = result.reference_avg;
    so.n_candidates = 1000;
    for (std::size_t run = 0; run < o.runs; ++run) {
      for (const auto& c : sample_candidates(groups, so, derive(Seed{r}, "run", run)).candidates) {
        ++candidates;
        std::set<std::string> distinct;
        bool ok = c.groups.size() == 10 && std::fabs(c.avg_error - so.reference_avg) <= 1.0 + 1e-9;
        for (const auto& g : c.groups) {
          distinct.insert(g.corruption);
          ok &= g.severities().front() >= 1 && g.severities().back() <= 10;
        }
        violations += !ok || distinct.size() != 10;
      }
    }
  }
  return {recovered == 10 && violations == 0,
          fmt("%zu/10 runs recovered the planted set; %zu/%zu candidates violate the constraint", recovered, violations,
              candidates)};
}

Outcome distance_oracle() {
  Rng rng(Seed{909});
  std::size_t mismatches = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t dim = 1 + rng.below(32), nref = 1 + rng.below(40), ngroups = 1 + rng.below(10);
    std::vector<FeatureVector> refs;
    for (std::size_t j = 0; j < nref; ++j) refs.push_back(normal_vector(rng, dim, 1.0));
    CenterMap centers;
    CandidateDataset cand;
    for (std::size_t g = 0; g < ngroups; ++g) {
      const std::string name = fmt("c%02zu", g);
      for (int s = 1; s <= 10; ++s) centers.emplace(std::make_pair(name, s), normal_vector(rng, dim, 2.0));
      cand.groups.push_back({name, 3 + static_cast<int>(rng.below(6)), 0.0, 0.0});
    }
    double sum = 0;
    std::size_t terms = 0;
    for (const auto& g : cand.groups) {
      for (int s = g.center - 2; s <= g.center + 2; ++s) {
        const auto& x = centers.at({g.corruption, s});
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : refs) {
          double acc = 0;
          for (std::size_t d = 0; d < dim; ++d) acc += (x.values[d] - r.values[d]) * (x.values[d] - r.values[d]);
          best = std::min(best, std::sqrt(acc));
        }
        sum += best;
        ++terms;
      }
    }
    mismatches += dataset_distance(cand, centers, refs) != sum / static_cast<double>(terms);
  }
  return {mismatches == 0, fmt("%zu/100 instances differ from the brute-force mean of minima", mismatches)};
}

Outcome variance_shrinks() {
  const auto pool = synthetic_pool(2000, 32, 32, Seed{1001});
  const auto ex = Extractor::builtin();
  const std::size_t sizes[] = {25, 100, 400};
  std::vector<double> medians;
  for (std::size_t n : sizes) {
    std::vector<double> trials;
    for (std::uint64_t t = 0; t < 5; ++t) {
      trials.push_back(variance_probe(ex, "gaussian_noise", 3, pool, {n, 10, 10}, derive(Seed{1002}, "trial", t)).percent);
    }
    medians.push_back(median(trials));
  }
  return {medians[0] > medians[1] && medians[1] > medians[2],
          fmt("median std/mean %% at 25/100/400 images: %.3f / %.3f / %.3f", medians[0], medians[1], medians[2])};
}

Outcome correlation_smoke() {
  const auto subset = sample_subset(synthetic_pool(300, 32, 32, Seed{1101}), 100, Seed{1102});
  const auto ex = Extractor::builtin();
  const EmbeddedSubset emb(ex, subset);
  const auto schemes = enumerate_powerset();
  const std::vector<std::string> corruptions = {"gaussian_noise", "defocus_blur", "contrast", "fog", "pixelate"};

  // Measured distances use one set of augmentation and corruption draws; the
  // error model is driven by distances from an independent set of the same
  // size. Below ~64 samples per scheme the MSD estimate is dominated by
  // sampling noise and its ranking of schemes is unstable.
  auto centers_for = [&](Seed seed, std::size_t draws) {
    std::vector<FeatureVector> out;
    for (const auto& c : corruptions) {
      out.push_back(corruption_center(emb, c, 3, {draws, false}, derive(seed, "center", fnv1a64(c))));
    }
    return out;
  };
  auto samples_for = [&](std::size_t scheme, Seed seed, std::size_t n) {
    SampleSet s(ex.dim(), ex.fingerprint());
    for (std::size_t i = 0; i < n; ++i) {
      const auto aug = sample_augmentation(schemes[scheme], derive(seed, "draw", i));
      s.add(featurize_transform(emb, aug, schemes[scheme].label() + "/" + std::to_string(i)).feature);
    }
    return s;
  };
  const auto measured_centers = centers_for(Seed{1103}, 10), true_centers = centers_for(Seed{1104}, 10);

  std::vector<std::vector<double>> measured(corruptions.size()), truth(corruptions.size());
  for (std::size_t k = 0; k < 32; ++k) {
    const std::size_t scheme = 16 * k + (7 * k) % 16;
    const auto m = samples_for(scheme, derive(Seed{1105}, "scheme", scheme), 64);
    const auto t = samples_for(scheme, derive(Seed{1106}, "scheme", scheme), 64);
    for (std::size_t c = 0; c < corruptions.size(); ++c) {
      measured[c].push_back(msd(m, measured_centers[c]));
      truth[c].push_back(msd(t, true_centers[c]));
    }
  }

  Rng noise(Seed{1107});
  std::size_t strong = 0;
  std::string rhos;
  for (std::size_t c = 0; c < corruptions.size(); ++c) {
    const auto [lo, hi] = std::minmax_element(truth[c].begin(), truth[c].end());
    std::vector<double> error;
    for (double d : truth[c]) {
      const double u = (d - *lo) / (*hi - *lo);
      error.push_back(20.0 + 40.0 * std::sqrt(u) + noise.normal(0.0, 2.0));
    }
    const double rho = spearman(measured[c], error);
    strong += rho > 0.6;
    rhos += fmt(" %s=%.2f", corruptions[c].c_str(), rho);
  }
  return {strong >= 4, fmt("%zu/5 corruptions with rho > 0.6:%s", strong, rhos.c_str())};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"feature-space identity is zero", 60, identity_is_zero},
      {"msd equals exhaustive scan, union monotone", 60, msd_matches_scan},
      {"mixture toy: linear mmd, low msd", 120, mixture_toy},
      {"spearman matches rank oracle, monotone invariant", 60, spearman_oracle},
      {"powerset has 512 schemes, 256 per op", 1, powerset_shape},
      {"transforms deterministic, in range, shape preserved", 300, determinism_and_range},
      {"severity strictly increases distortion", 300, severity_monotonicity},
      {"builder recovers planted corruptions", 180, planted_recovery},
      {"dataset distance matches brute force", 60, distance_oracle},
      {"variance probe shrinks with more images", 300, variance_shrinks},
      {"msd rank-correlates with synthetic error", 600, correlation_smoke},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s  %-52s %s [%.1fs / %.0fs%s]\n", pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                c.budget_s, in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
