#pragma once

#include <cstddef>
#include <vector>

#include "augdist/distances.hpp"

// Mixture toy: an augmentation distribution that draws a fraction alpha of
// its samples from the target corruption's feature distribution and the rest
// from another one. MMD to the target grows linearly as alpha falls, while
// MSD stays small as long as some target-like samples are drawn.

namespace augdist {

struct ToyMixRow {
  double alpha = 0.0;
  double mmd = 0.0;
  double msd = 0.0;
  double analytic_mmd = 0.0;  // (1 - alpha) * ||mu_other - mu_target||
};

struct ToyMixOptions {
  std::size_t dim = 2;
  std::size_t samples = 10000;
  double separation = 10.0;  // ||mu_other - mu_target||
  double sigma = 1.0;        // isotropic cluster std
  std::vector<double> alphas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
};

/// Synthetic Gaussian clusters: target at the origin (which is also the
/// target center), other at separation * e_0. round(alpha * samples) draws
/// come from the target cluster.
std::vector<ToyMixRow> toy_mix(const ToyMixOptions& options, Seed seed);

/// Same sweep over real feature pools, drawing rows with replacement. The
/// target center is the mean of the target pool and analytic_mmd uses the
/// distance between the two pool means.
std::vector<ToyMixRow> toy_mix(const SampleSet& target, const SampleSet& other, const std::vector<double>& alphas,
                               std::size_t samples, Seed seed);

/// 1 - SS_res / SS_tot of the measured MMD against the analytic line.
double analytic_r_squared(const std::vector<ToyMixRow>& rows);

}  // namespace augdist
