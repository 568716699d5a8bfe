#include "augdist/benchmark_builder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "augdist/errors.hpp"
#include "augdist/kernels.hpp"

namespace augdist {

// ---- error tables ----

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  return out;
}

double parse_number(const std::string& s, int line_no) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw FormatError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

ErrorTable ErrorTable::parse(std::string_view text) {
  ErrorTable t;
  std::stringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      if (body.rfind("baseline=", 0) == 0) t.baseline = trim(std::string_view(body).substr(9));
      continue;
    }
    const auto cells = split(line, ',');
    if (!header) {
      if (cells != std::vector<std::string>{"corruption", "severity", "error"}) {
        throw FormatError("error table must start with the header 'corruption,severity,error'");
      }
      header = true;
      continue;
    }
    if (cells.size() != 3 || cells[0].empty()) {
      throw FormatError("line " + std::to_string(line_no) + ": expected corruption,severity,error");
    }
    const double sev = parse_number(cells[1], line_no);
    if (sev != std::floor(sev) || sev < 1 || sev > 100) {
      throw FormatError("line " + std::to_string(line_no) + ": severity must be a positive integer");
    }
    t.set(cells[0], static_cast<int>(sev), parse_number(cells[2], line_no));
  }
  if (!header) throw FormatError("error table has no header");
  return t;
}

ErrorTable ErrorTable::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open error table " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void ErrorTable::set(const std::string& corruption, int severity, double error) {
  if (!(error >= 0.0 && error <= 100.0)) {
    throw FormatError("error for " + corruption + "/" + std::to_string(severity) + " outside [0, 100]");
  }
  auto& row = entries_[corruption];
  if (!row.emplace(severity, error).second) {
    throw FormatError("duplicate error entry " + corruption + "/" + std::to_string(severity));
  }
}

bool ErrorTable::contains(std::string_view corruption, int severity) const {
  auto it = entries_.find(corruption);
  return it != entries_.end() && it->second.contains(severity);
}

double ErrorTable::at(std::string_view corruption, int severity) const {
  auto it = entries_.find(corruption);
  if (it == entries_.end() || !it->second.contains(severity)) {
    throw CoverageError("error table has no entry " + std::string(corruption) + "/" + std::to_string(severity));
  }
  return it->second.at(severity);
}

std::vector<std::string> ErrorTable::corruptions() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

const std::map<int, double>& ErrorTable::severities(std::string_view corruption) const {
  auto it = entries_.find(corruption);
  if (it == entries_.end()) throw CoverageError("error table has no corruption " + std::string(corruption));
  return it->second;
}

std::string ErrorTable::to_text() const {
  std::ostringstream out;
  out.precision(17);
  if (!baseline.empty()) out << "# baseline=" << baseline << "\n";
  out << "corruption,severity,error\n";
  for (const auto& [name, row] : entries_)
    for (const auto& [sev, err] : row) out << name << "," << sev << "," << err << "\n";
  return out.str();
}

double ErrorTable::average() const {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& [_, row] : entries_)
    for (const auto& [__, err] : row) {
      sum += err;
      ++n;
    }
  if (n == 0) throw CoverageError("error table is empty");
  return sum / static_cast<double>(n);
}

double ErrorTable::mean_spread() const {
  if (entries_.empty()) throw CoverageError("error table is empty");
  double sum = 0;
  for (const auto& [_, row] : entries_) {
    auto [lo, hi] = std::minmax_element(row.begin(), row.end(),
                                        [](const auto& a, const auto& b) { return a.second < b.second; });
    sum += hi->second - lo->second;
  }
  return sum / static_cast<double>(entries_.size());
}

// ---- groups ----

std::vector<SeverityGroup> form_severity_groups(const ErrorTable& errors, double spread_target, double band) {
  if (!(spread_target >= 0.0) || !(band >= 0.0)) throw DomainError("spread target and band must be >= 0");
  std::vector<SeverityGroup> groups;
  for (const auto& name : errors.corruptions()) {
    for (int s = 1; s <= 10; ++s) {
      if (!errors.contains(name, s)) {
        throw CoverageError("error table lacks " + name + "/" + std::to_string(s) + " (severities 1..10 required)");
      }
    }
    for (int c = kMinGroupCenter; c <= kMaxGroupCenter; ++c) {
      SeverityGroup g{name, c, 0.0, 0.0};
      double lo = 100, hi = 0;
      for (int s : g.severities()) {
        const double e = errors.at(name, s);
        g.error += e;
        lo = std::min(lo, e);
        hi = std::max(hi, e);
      }
      g.error /= 5.0;
      g.spread = hi - lo;
      if (std::fabs(g.spread - spread_target) <= band * spread_target + 1e-9) groups.push_back(g);
    }
  }
  return groups;
}

// ---- candidates ----

std::vector<std::string> CandidateDataset::corruptions() const {
  std::vector<std::string> out;
  for (const auto& g : groups) out.push_back(g.corruption);
  return out;
}

std::vector<int> CandidateDataset::centers() const {
  std::vector<int> out;
  for (const auto& g : groups) out.push_back(g.center);
  return out;
}

namespace {

struct HalfChoice {
  bool feasible = false;
  std::vector<int> picks;       // group index (into that corruption's list) per member
  double avg = 0.0;
  double closest_avg = 0.0;     // assignment average nearest the reference
};

class HalfSolver {
public:
  HalfSolver(const std::vector<std::vector<const SeverityGroup*>>& by_corruption, double reference,
             double tolerance, Seed seed)
      : by_(by_corruption), ref_(reference), tol_(tolerance), seed_(seed) {}

  HalfChoice get(const std::vector<std::size_t>& members) {
    {
      std::lock_guard lock(mutex_);
      auto it = cache_.find(members);
      if (it != cache_.end()) return it->second;
    }
    HalfChoice c = solve(members);
    std::lock_guard lock(mutex_);
    return cache_.emplace(members, std::move(c)).first->second;
  }

private:
  template <class Visit>
  void enumerate(const std::vector<std::size_t>& members, Visit visit) const {
    std::vector<int> picks(members.size(), 0);
    while (true) {
      double sum = 0;
      for (std::size_t i = 0; i < members.size(); ++i) sum += by_[members[i]][picks[i]]->error;
      visit(picks, sum / static_cast<double>(members.size()));
      std::size_t i = 0;
      for (; i < members.size(); ++i) {
        if (++picks[i] < static_cast<int>(by_[members[i]].size())) break;
        picks[i] = 0;
      }
      if (i == members.size()) return;
    }
  }

  bool ok(double avg) const { return std::fabs(avg - ref_) <= tol_ + 1e-9; }

  HalfChoice solve(const std::vector<std::size_t>& members) const {
    HalfChoice c;
    std::uint64_t feasible = 0;
    double best = std::numeric_limits<double>::infinity();
    enumerate(members, [&](const std::vector<int>&, double avg) {
      if (ok(avg)) ++feasible;
      if (std::fabs(avg - ref_) < best) {
        best = std::fabs(avg - ref_);
        c.closest_avg = avg;
      }
    });
    if (feasible == 0) return c;
    std::uint64_t key = 0;
    for (auto m : members) key = mix64(key + m + 1);
    Rng rng(derive(seed_, "half", key));
    std::uint64_t target = rng.below(feasible);
    enumerate(members, [&](const std::vector<int>& picks, double avg) {
      if (!ok(avg)) return;
      if (target-- == 0) {
        c.feasible = true;
        c.picks = picks;
        c.avg = avg;
      }
    });
    return c;
  }

  const std::vector<std::vector<const SeverityGroup*>>& by_;
  double ref_, tol_;
  Seed seed_;
  std::mutex mutex_;
  std::map<std::vector<std::size_t>, HalfChoice> cache_;
};

}  // namespace

CandidateSample sample_candidates(const std::vector<SeverityGroup>& groups, const SamplingOptions& options, Seed seed) {
  if (options.half_size < 1) throw DomainError("half size must be >= 1");
  if (!(options.tolerance >= 0.0)) throw DomainError("tolerance must be >= 0");
  std::set<std::string> allowed(options.only.begin(), options.only.end());
  std::map<std::string, std::vector<const SeverityGroup*>> grouped;
  for (const auto& g : groups) {
    if (allowed.empty() || allowed.contains(g.corruption)) grouped[g.corruption].push_back(&g);
  }
  const std::size_t need = 2 * options.half_size;
  if (grouped.size() < need) {
    throw DomainError("need at least " + std::to_string(need) + " corruptions with severity groups, have " +
                      std::to_string(grouped.size()));
  }
  std::vector<std::string> names;
  std::vector<std::vector<const SeverityGroup*>> by;
  for (auto& [name, list] : grouped) {
    names.push_back(name);
    by.push_back(list);
  }

  HalfSolver solver(by, options.reference_avg, options.tolerance, seed);
  const std::size_t m = names.size(), h = options.half_size;
  const auto n = static_cast<std::ptrdiff_t>(options.n_candidates);
  std::vector<std::optional<CandidateDataset>> found(options.n_candidates);
  std::vector<double> nearest(options.n_candidates, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::size_t> attempts(options.n_candidates, 0);

#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    Rng rng(derive(seed, "candidate", static_cast<std::uint64_t>(i)));
    for (std::size_t a = 0; a < options.attempts_per_candidate; ++a) {
      ++attempts[i];
      auto order = rng.sample_indices(m, 2 * h);
      std::vector<std::size_t> first(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(h));
      std::vector<std::size_t> second(order.begin() + static_cast<std::ptrdiff_t>(h), order.end());
      std::sort(first.begin(), first.end());
      std::sort(second.begin(), second.end());
      const HalfChoice c1 = solver.get(first), c2 = solver.get(second);
      const double guess = 0.5 * (c1.closest_avg + c2.closest_avg);
      if (std::isnan(nearest[i]) || std::fabs(guess - options.reference_avg) < std::fabs(nearest[i] - options.reference_avg)) {
        nearest[i] = guess;
      }
      if (!c1.feasible || !c2.feasible) continue;
      CandidateDataset cand;
      double sum = 0;
      for (const auto* half : {&first, &second}) {
        const HalfChoice& c = half == &first ? c1 : c2;
        for (std::size_t k = 0; k < h; ++k) {
          const SeverityGroup& g = *by[(*half)[k]][c.picks[k]];
          cand.groups.push_back(g);
          sum += g.error;
        }
      }
      std::sort(cand.groups.begin(), cand.groups.end(),
                [](const SeverityGroup& a, const SeverityGroup& b) { return a.corruption < b.corruption; });
      cand.avg_error = sum / static_cast<double>(2 * h);
      nearest[i] = cand.avg_error;
      found[i] = std::move(cand);
      break;
    }
  }

  CandidateSample out;
  out.requested = options.n_candidates;
  double best = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < found.size(); ++i) {
    out.attempts += attempts[i];
    if (!std::isnan(nearest[i]) &&
        (std::isnan(best) || std::fabs(nearest[i] - options.reference_avg) < std::fabs(best - options.reference_avg))) {
      best = nearest[i];
    }
    if (found[i]) out.candidates.push_back(std::move(*found[i]));
  }
  out.nearest_average = best;
  out.shortfall = out.candidates.size() < out.requested;
  if (out.candidates.empty() && out.requested > 0) {
    std::ostringstream msg;
    msg << "no candidate within " << options.tolerance << " points of reference average " << options.reference_avg
        << " after " << out.attempts << " attempts; nearest achievable average seen: " << best;
    throw FeasibilityError(msg.str(), best);
  }
  return out;
}

// ---- distances ----

std::vector<double> member_terms(const CandidateDataset& candidate, const CenterMap& new_centers,
                                 std::span<const FeatureVector> reference_centers) {
  if (reference_centers.empty()) throw CoverageError("no reference centers");
  std::vector<double> terms;
  for (const auto& g : candidate.groups) {
    for (int s : g.severities()) {
      auto it = new_centers.find({g.corruption, s});
      if (it == new_centers.end()) {
        throw CoverageError("no feature center for " + g.corruption + "/" + std::to_string(s));
      }
      double best = std::numeric_limits<double>::infinity();
      for (const auto& r : reference_centers) {
        check_compatible(it->second, r);
        best = std::min(best, kernels::squared_distance(it->second.values.data(), r.values.data(), r.dim()));
      }
      terms.push_back(std::sqrt(best));
    }
  }
  return terms;
}

double dataset_distance(const CandidateDataset& candidate, const CenterMap& new_centers,
                        std::span<const FeatureVector> reference_centers) {
  const auto terms = member_terms(candidate, new_centers, reference_centers);
  if (terms.empty()) throw CoverageError("candidate has no members");
  double sum = 0;
  for (double t : terms) sum += t;
  return sum / static_cast<double>(terms.size());
}

// ---- ranking and selection ----

std::vector<std::string> ContributionRanking::top(std::size_t k) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, entries.size()); ++i) out.push_back(entries[i].corruption);
  return out;
}

namespace {

void sort_ranking(ContributionRanking& r) {
  std::sort(r.entries.begin(), r.entries.end(), [](const Contribution& a, const Contribution& b) {
    return a.normalized > b.normalized || (a.normalized == b.normalized && a.corruption < b.corruption);
  });
}

}  // namespace

ContributionRanking rank_contributions(const std::vector<CandidateDataset>& candidates,
                                       const std::vector<std::vector<double>>& terms) {
  if (candidates.empty()) throw DomainError("rank_contributions needs at least one candidate");
  if (terms.size() != candidates.size()) throw DomainError("one term list per candidate expected");
  std::map<std::string, std::pair<double, std::size_t>> acc;
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& groups = candidates[i].groups;
    if (terms[i].size() != groups.size() * 5) throw DomainError("expected five member terms per group");
    for (std::size_t g = 0; g < groups.size(); ++g) {
      auto& [s, n] = acc[groups[g].corruption];
      for (std::size_t k = 0; k < 5; ++k) {
        s += terms[i][g * 5 + k];
        ++n;
        sum += terms[i][g * 5 + k];
        ++count;
      }
    }
  }
  const double mean = sum / static_cast<double>(count);
  double ss = 0;
  for (const auto& t : terms)
    for (double v : t) ss += (v - mean) * (v - mean);
  ContributionRanking r;
  r.population_std = std::sqrt(ss / static_cast<double>(count));
  for (const auto& [name, sn] : acc) {
    const double raw = sn.first / static_cast<double>(sn.second);
    r.entries.push_back({name, r.population_std > 0 ? raw / r.population_std : raw, raw, sn.second});
  }
  sort_ranking(r);
  return r;
}

ContributionRanking average_rankings(const std::vector<ContributionRanking>& runs) {
  if (runs.empty()) throw DomainError("no rankings to average");
  std::map<std::string, Contribution> acc;
  std::map<std::string, std::size_t> seen;
  ContributionRanking r;
  for (const auto& run : runs) {
    r.population_std += run.population_std / static_cast<double>(runs.size());
    for (const auto& e : run.entries) {
      auto& a = acc[e.corruption];
      a.corruption = e.corruption;
      a.normalized += e.normalized;
      a.raw += e.raw;
      a.members += e.members;
      ++seen[e.corruption];
    }
  }
  for (auto& [name, a] : acc) {
    a.normalized /= static_cast<double>(seen[name]);
    a.raw /= static_cast<double>(seen[name]);
    r.entries.push_back(a);
  }
  sort_ranking(r);
  return r;
}

CandidateDataset select_benchmark(const ContributionRanking& ranking, const std::vector<CandidateDataset>& candidates,
                                  double reference_avg, std::size_t k) {
  if (ranking.entries.size() < k) {
    throw CompositionError("only " + std::to_string(ranking.entries.size()) + " ranked corruptions, need " +
                           std::to_string(k));
  }
  auto top = ranking.top(k);
  std::sort(top.begin(), top.end());
  const CandidateDataset* best = nullptr;
  for (const auto& c : candidates) {
    if (c.corruptions() != top) continue;
    if (!best) {
      best = &c;
      continue;
    }
    const double d = std::fabs(c.avg_error - reference_avg), db = std::fabs(best->avg_error - reference_avg);
    if (d < db || (d == db && c.centers() < best->centers())) best = &c;
  }
  if (!best) throw CompositionError("no sampled candidate consists of exactly the top " + std::to_string(k));
  return *best;
}

namespace {

// Member term of every (corruption, severity) that any group can use.
std::map<std::pair<std::string, int>, double> all_member_terms(const std::vector<SeverityGroup>& groups,
                                                               const CenterMap& centers,
                                                               std::span<const FeatureVector> refs) {
  if (refs.empty()) throw CoverageError("no reference centers");
  std::vector<std::pair<std::string, int>> keys;
  std::set<std::pair<std::string, int>> seen;
  for (const auto& g : groups)
    for (int s : g.severities())
      if (seen.insert({g.corruption, s}).second) keys.push_back({g.corruption, s});
  const std::size_t dim = refs[0].dim();
  std::vector<double> a, b;
  for (const auto& key : keys) {
    auto it = centers.find(key);
    if (it == centers.end()) throw CoverageError("no feature center for " + key.first + "/" + std::to_string(key.second));
    check_compatible(it->second, refs[0]);
    a.insert(a.end(), it->second.values.begin(), it->second.values.end());
  }
  for (const auto& r : refs) {
    check_compatible(r, refs[0]);
    b.insert(b.end(), r.values.begin(), r.values.end());
  }
  std::vector<double> out(keys.size());
  kernels::omp::min_distances_sq(a.data(), keys.size(), b.data(), refs.size(), dim, out.data());
  std::map<std::pair<std::string, int>, double> terms;
  for (std::size_t i = 0; i < keys.size(); ++i) terms[keys[i]] = std::sqrt(out[i]);
  return terms;
}

std::vector<std::vector<double>> terms_for(const std::vector<CandidateDataset>& candidates,
                                           const std::map<std::pair<std::string, int>, double>& table) {
  std::vector<std::vector<double>> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    std::vector<double> t;
    for (const auto& g : c.groups)
      for (int s : g.severities()) t.push_back(table.at({g.corruption, s}));
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

BuildResult build_benchmark(const BuildInputs& inputs, const BuildOptions& options, Seed seed) {
  if (options.runs < 1 || options.n_candidates < 1 || options.k < 2 || options.k % 2 != 0) {
    throw ConfigError("runs and candidates must be >= 1 and k an even number >= 2");
  }
  BuildResult result;
  result.reference_avg = inputs.reference_errors.average();
  result.spread_target = options.spread_target.value_or(inputs.reference_errors.mean_spread());
  const auto groups = form_severity_groups(inputs.new_errors, result.spread_target, options.band);
  result.groups = groups.size();
  const auto table = all_member_terms(groups, inputs.new_centers, inputs.reference_centers);

  SamplingOptions sampling;
  sampling.reference_avg = result.reference_avg;
  sampling.tolerance = options.tolerance;
  sampling.n_candidates = options.n_candidates;
  sampling.half_size = options.k / 2;

  std::vector<CandidateDataset> all;
  std::vector<ContributionRanking> runs;
  for (std::size_t r = 0; r < options.runs; ++r) {
    auto sample = sample_candidates(groups, sampling, derive(seed, "run", r));
    result.shortfall = result.shortfall || sample.shortfall;
    runs.push_back(rank_contributions(sample.candidates, terms_for(sample.candidates, table)));
    all.insert(all.end(), std::make_move_iterator(sample.candidates.begin()),
               std::make_move_iterator(sample.candidates.end()));
  }
  result.ranking = average_rankings(runs);
  result.candidates = all.size();

  try {
    result.benchmark = select_benchmark(result.ranking, all, result.reference_avg, options.k);
  } catch (const CompositionError&) {
    sampling.only = result.ranking.top(options.k);
    CandidateSample again;
    try {
      again = sample_candidates(groups, sampling, derive(seed, "resample"));
    } catch (const FeasibilityError& e) {
      throw CompositionError(std::string("top-ranked corruptions admit no candidate: ") + e.what());
    }
    result.resampled = true;
    result.candidates += again.candidates.size();
    result.benchmark = select_benchmark(result.ranking, again.candidates, result.reference_avg, options.k);
  }
  result.distance = dataset_distance(result.benchmark, inputs.new_centers, inputs.reference_centers);
  return result;
}

}  // namespace augdist
