#include "augdist/toy_mix.hpp"

#include <cmath>

#include "augdist/errors.hpp"

namespace augdist {

namespace {

template <class Draw>
ToyMixRow mix_row(double alpha, std::size_t samples, const FeatureVector& center, double separation, Draw draw) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("mixing fraction must be in [0, 1]");
  const auto from_target = static_cast<std::size_t>(std::llround(alpha * static_cast<double>(samples)));
  SampleSet set(center.dim(), center.fingerprint);
  set.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) set.add(draw(i < from_target, i));
  const DistanceReport r = distance_report(set, center);
  return {alpha, r.mmd, r.msd, (1.0 - alpha) * separation};
}

}  // namespace

std::vector<ToyMixRow> toy_mix(const ToyMixOptions& options, Seed seed) {
  if (options.dim < 1 || options.samples < 1) throw DomainError("toy mix needs dim and samples >= 1");
  const FeatureVector center{std::vector<double>(options.dim, 0.0), "toy-mix"};
  std::vector<ToyMixRow> rows;
  for (std::size_t a = 0; a < options.alphas.size(); ++a) {
    Rng rng(derive(seed, "toy-mix", a));
    rows.push_back(mix_row(options.alphas[a], options.samples, center, options.separation, [&](bool target, std::size_t) {
      FeatureVector v{std::vector<double>(options.dim), "toy-mix"};
      for (auto& x : v.values) x = options.sigma * rng.normal();
      if (!target) v.values[0] += options.separation;
      return v;
    }));
  }
  return rows;
}

std::vector<ToyMixRow> toy_mix(const SampleSet& target, const SampleSet& other, const std::vector<double>& alphas,
                               std::size_t samples, Seed seed) {
  if (target.empty() || other.empty()) throw DomainError("toy mix needs nonempty feature pools");
  const FeatureVector center = target.mean();
  const double separation = euclidean(other.mean(), center);
  std::vector<ToyMixRow> rows;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    Rng rng(derive(seed, "toy-mix", a));
    rows.push_back(mix_row(alphas[a], samples, center, separation, [&](bool from_target, std::size_t) {
      const SampleSet& pool = from_target ? target : other;
      return pool.vector(rng.below(pool.size()));
    }));
  }
  return rows;
}

double analytic_r_squared(const std::vector<ToyMixRow>& rows) {
  if (rows.size() < 2) throw DomainError("need at least two mixing fractions");
  double mean = 0;
  for (const auto& r : rows) mean += r.mmd;
  mean /= static_cast<double>(rows.size());
  double res = 0, tot = 0;
  for (const auto& r : rows) {
    res += (r.mmd - r.analytic_mmd) * (r.mmd - r.analytic_mmd);
    tot += (r.mmd - mean) * (r.mmd - mean);
  }
  if (tot == 0.0) throw UndefinedError("measured MMD is constant across mixing fractions");
  return 1.0 - res / tot;
}

}  // namespace augdist
