#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "augdist/features.hpp"
#include "augdist/rng.hpp"

// Construction of a benchmark of new corruptions that is far, in transform
// feature space, from a reference benchmark while matching its average
// baseline error.

namespace augdist {

/// Baseline error percentages per (corruption, severity).
///
/// Text format: '#' comment lines, where "# baseline=<tag>" sets the tag; a
/// header line "corruption,severity,error"; then one row per entry.
class ErrorTable {
public:
  static ErrorTable parse(std::string_view text);
  static ErrorTable load(const std::filesystem::path& path);

  std::string baseline;

  /// Throws FormatError when error is outside [0, 100] or the key repeats.
  void set(const std::string& corruption, int severity, double error);
  /// Throws CoverageError when missing.
  double at(std::string_view corruption, int severity) const;
  bool contains(std::string_view corruption, int severity) const;
  std::vector<std::string> corruptions() const;
  const std::map<int, double>& severities(std::string_view corruption) const;
  std::string to_text() const;

  /// Mean over every entry.
  double average() const;
  /// Mean over corruptions of (max - min) across that corruption's severities.
  double mean_spread() const;

private:
  std::map<std::string, std::map<int, double>, std::less<>> entries_;
};

/// Severities center-2 .. center+2 of one corruption, center in [3, 8].
struct SeverityGroup {
  std::string corruption;
  int center = 0;
  double error = 0.0;   // mean error over the five severities
  double spread = 0.0;  // max - min error over the five severities

  std::array<int, 5> severities() const noexcept { return {center - 2, center - 1, center, center + 1, center + 2}; }
};

inline constexpr int kMinGroupCenter = 3;
inline constexpr int kMaxGroupCenter = 8;

/// For each corruption, every center in [3, 8] whose spread lies within
/// band * spread_target of spread_target. Throws CoverageError when a
/// corruption lacks any of severities 1..10.
std::vector<SeverityGroup> form_severity_groups(const ErrorTable& errors, double spread_target, double band = 0.5);

/// Ten severity groups of distinct corruptions, sorted by corruption name.
struct CandidateDataset {
  std::vector<SeverityGroup> groups;
  double avg_error = 0.0;

  std::vector<std::string> corruptions() const;
  /// Group centers in corruption-name order, used to break ties.
  std::vector<int> centers() const;
  friend bool operator==(const CandidateDataset& a, const CandidateDataset& b) {
    return a.centers() == b.centers() && a.corruptions() == b.corruptions();
  }
};

struct SamplingOptions {
  double reference_avg = 0.0;
  double tolerance = 1.0;          // percentage points
  std::size_t n_candidates = 100000;
  std::size_t attempts_per_candidate = 100;
  std::size_t half_size = 5;       // candidates are two disjoint halves
  /// Restrict sampling to these corruptions (empty = all with groups).
  std::vector<std::string> only;
};

struct CandidateSample {
  std::vector<CandidateDataset> candidates;
  std::size_t requested = 0;
  std::size_t attempts = 0;
  bool shortfall = false;
  /// Achievable candidate average closest to the reference among everything
  /// examined; equals a candidate's average when any was found.
  double nearest_average = 0.0;
};

/// Candidate i is drawn from its own stream derive(seed, "candidate", i): a
/// random half of `half_size` corruptions is drawn, then a random disjoint
/// second half; each half uses one severity assignment chosen at random
/// (fixed per half, seeded by the half's membership) among the assignments
/// whose average error is within tolerance. Halves with no such assignment
/// are rejected. Candidates that exhaust their attempt budget are dropped
/// and reported as a shortfall. Throws FeasibilityError when no candidate at
/// all is found.
CandidateSample sample_candidates(const std::vector<SeverityGroup>& groups, const SamplingOptions& options, Seed seed);

/// Feature centers keyed by (corruption, severity).
using CenterMap = std::map<std::pair<std::string, int>, FeatureVector>;

/// min over reference centers of the distance from each member's center, in
/// group then severity order (50 terms for a 10-group candidate).
std::vector<double> member_terms(const CandidateDataset& candidate, const CenterMap& new_centers,
                                 std::span<const FeatureVector> reference_centers);
/// Mean of member_terms.
double dataset_distance(const CandidateDataset& candidate, const CenterMap& new_centers,
                        std::span<const FeatureVector> reference_centers);

struct Contribution {
  std::string corruption;
  double normalized = 0.0;  // raw / population std of all member terms
  double raw = 0.0;         // mean of this corruption's member terms
  std::size_t members = 0;
};

/// Sorted by normalized contribution, descending; ties by name.
struct ContributionRanking {
  std::vector<Contribution> entries;
  double population_std = 0.0;

  std::vector<std::string> top(std::size_t k) const;
};

/// terms[i] are the member terms of candidates[i]. When every term is equal
/// the population std is 0 and normalized values equal the raw values.
ContributionRanking rank_contributions(const std::vector<CandidateDataset>& candidates,
                                       const std::vector<std::vector<double>>& terms);
/// Mean normalized (and raw) contribution per corruption over runs.
ContributionRanking average_rankings(const std::vector<ContributionRanking>& runs);

/// Among candidates made of exactly the top-k corruptions, the one whose
/// average error is closest to reference_avg; ties go to the
/// lexicographically smallest center vector. Throws CompositionError when no
/// candidate matches.
CandidateDataset select_benchmark(const ContributionRanking& ranking, const std::vector<CandidateDataset>& candidates,
                                  double reference_avg, std::size_t k = 10);

struct BuildOptions {
  double tolerance = 1.0;
  double band = 0.5;
  std::optional<double> spread_target;  // default: reference mean spread
  std::size_t n_candidates = 100000;
  std::size_t runs = 10;
  std::size_t k = 10;
};

struct BuildInputs {
  ErrorTable new_errors;        // severities 1..10 per new corruption
  ErrorTable reference_errors;  // reference benchmark
  CenterMap new_centers;
  std::vector<FeatureVector> reference_centers;
};

struct BuildResult {
  CandidateDataset benchmark;
  ContributionRanking ranking;
  double distance = 0.0;
  double reference_avg = 0.0;
  double spread_target = 0.0;
  std::size_t groups = 0;
  std::size_t candidates = 0;
  bool shortfall = false;
  bool resampled = false;  // top-k had no candidate; sampled again within the top-k
};

/// Groups, `runs` seeded rounds of candidate sampling and ranking, averaged
/// ranking, then selection among every sampled candidate.
BuildResult build_benchmark(const BuildInputs& inputs, const BuildOptions& options, Seed seed);

}  // namespace augdist
