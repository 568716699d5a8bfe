#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "augdist/augmix.hpp"
#include "augdist/benchmark_builder.hpp"
#include "augdist/config.hpp"
#include "augdist/dataset.hpp"
#include "augdist/distances.hpp"
#include "augdist/errors.hpp"
#include "augdist/feature_io.hpp"
#include "augdist/features.hpp"
#include "augdist/render.hpp"
#include "augdist/toy_mix.hpp"
#include "augdist/transforms.hpp"

namespace augdist::cli {

namespace {

struct Context {
  RunConfig cfg;
  std::optional<Registry> custom;
  std::ostream* out;
  std::ostream* err;

  const Registry& registry() const { return custom ? *custom : Registry::builtin(); }
};

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

/// "1-5", "3", "1,3,7-9".
std::vector<int> parse_range(const std::string& text) {
  std::set<int> values;
  for (const auto& part : split_list(text)) {
    const auto dash = part.find('-', 1);
    if (dash == std::string::npos) {
      values.insert(parse_int(part));
      continue;
    }
    const int lo = parse_int(part.substr(0, dash)), hi = parse_int(part.substr(dash + 1));
    if (hi < lo) throw ConfigError("empty range '" + part + "'");
    for (int v = lo; v <= hi; ++v) values.insert(v);
  }
  return {values.begin(), values.end()};
}

/// "reference", "cbar", "all", "none" or a comma list of names.
std::vector<std::string> corruption_names(const std::string& text, const Registry& registry) {
  if (text.empty() || text == "none") return {};
  std::vector<std::string> out;
  for (const auto& item : split_list(text)) {
    if (item == "reference" || item == "all") {
      for (auto& n : registry.names(TransformKind::corruption_reference)) out.push_back(n);
    }
    if (item == "cbar" || item == "all") {
      for (auto& n : registry.names(TransformKind::corruption_cbar)) out.push_back(n);
    }
    if (item == "reference" || item == "cbar" || item == "all") continue;
    const auto& entry = registry.find(item);
    if (entry.kind == TransformKind::augmentation) throw ConfigError(item + " is an augmentation, not a corruption");
    out.push_back(item);
  }
  return out;
}

/// (corruption, severity) pairs inside each corruption's severity range.
std::vector<std::pair<std::string, int>> corruption_grid(const Context& ctx, const std::string& corruptions,
                                                         const std::string& severities) {
  std::vector<std::pair<std::string, int>> grid;
  const auto sevs = parse_range(severities);
  for (const auto& name : corruption_names(corruptions, ctx.registry())) {
    const auto& e = ctx.registry().find(name);
    std::size_t skipped = 0;
    for (int s : sevs) {
      if (s >= e.min_severity && s <= e.max_severity) {
        grid.emplace_back(name, s);
      } else {
        ++skipped;
      }
    }
    if (skipped) *ctx.err << "note: " << name << " has severities " << e.min_severity << "-" << e.max_severity
                          << "; skipped " << skipped << " requested severities\n";
  }
  return grid;
}

struct ImageSource {
  std::filesystem::path dir;
  std::size_t synthetic = 0;
  int size = 32;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--images", dir, "Directory of PNG images");
    cmd->add_option("--synthetic", synthetic, "Use N procedurally generated images instead of --images");
    cmd->add_option("--image-size", size, "Side of synthetic images")->check(CLI::PositiveNumber);
  }

  ImageSubset pool(Seed seed) const {
    if (!dir.empty()) {
      require_exists(dir, "image directory");
      return load_all(dir);
    }
    if (synthetic > 0) return synthetic_pool(synthetic, size, size, derive(seed, "synthetic"));
    throw ConfigError("either --images or --synthetic is required");
  }

  ImageSubset subset(std::size_t n, Seed seed) const {
    if (!dir.empty()) {
      require_exists(dir, "image directory");
      return sample_subset(dir, n, seed);
    }
    return sample_subset(pool(seed), n, seed);
  }
};

Extractor make_extractor(const std::string& spec) {
  if (spec == "builtin") return Extractor::builtin();
  require_exists(spec, "feature file");
  return Extractor::from_file(spec);
}

// ---- feature file views ----

/// "name/severity" where name is a registry corruption or one of `extra`.
bool is_center_id(const std::string& id, const Registry& registry, const std::set<std::string>& extra) {
  const auto slash = id.rfind('/');
  if (slash == std::string::npos || slash + 1 == id.size() || id.size() - slash > 4) return false;
  const std::string sev = id.substr(slash + 1);
  if (!std::all_of(sev.begin(), sev.end(), [](char c) { return c >= '0' && c <= '9'; })) return false;
  const std::string name = id.substr(0, slash);
  if (extra.contains(name)) return true;
  return registry.contains(name) && registry.find(name).kind != TransformKind::augmentation;
}

struct SampleGroup {
  std::vector<std::string> ids;
  std::optional<SampleSet> set;
};

struct FeatureView {
  std::map<std::string, SampleGroup> groups;   // scheme label -> samples
  std::map<std::string, FeatureVector> centers;  // "name/severity" -> center
};

FeatureView split_features(const FeatureTable& table, const Registry& registry,
                           const std::set<std::string>& extra_corruptions = {}) {
  FeatureView view;
  for (const auto& r : table.records()) {
    FeatureVector v{r.values, table.fingerprint()};
    if (is_center_id(r.id, registry, extra_corruptions)) {
      view.centers.emplace(r.id, std::move(v));
      continue;
    }
    const auto slash = r.id.rfind('/');
    const std::string label = slash == std::string::npos ? r.id : r.id.substr(0, slash);
    auto& g = view.groups[label];
    if (!g.set) g.set.emplace(table.dim(), table.fingerprint());
    g.ids.push_back(r.id);
    g.set->add(v);
  }
  return view;
}

FeatureTable load_table(const std::filesystem::path& path) {
  require_exists(path, "feature file");
  return read_features(path);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// ---- commands ----

struct RenderArgs {
  std::filesystem::path input, output;
  std::string corruptions = "reference";
  std::string severities = "1-5";
  std::vector<std::string> transforms;
};

int cmd_render(Context& ctx, const RenderArgs& a) {
  require_exists(a.input, "input directory");
  if (a.output.empty()) throw ConfigError("--output is required");
  std::vector<TransformSpec> specs;
  for (const auto& [name, sev] : corruption_grid(ctx, a.corruptions, a.severities)) {
    specs.push_back({name, {}, sev, ctx.cfg.seed});
  }
  for (const auto& t : a.transforms) specs.push_back(parse_transform_spec(t, ctx.cfg.seed));
  if (specs.empty()) {
    *ctx.err << "nothing to render\n";
    return ok;
  }
  const auto records = render_dataset(a.input, specs, a.output, ctx.cfg.seed, ctx.registry());
  *ctx.out << "# wrote " << records.size() << " files and manifest.tsv under " << a.output.string() << "\n";
  return ok;
}

struct FeaturizeArgs {
  ImageSource images;
  std::vector<std::string> transforms;
  std::string corruptions = "none";
  std::string severities = "1-5";
  bool paired = false;
  bool powerset = false;
  std::string schemes = "0-511";
  std::size_t aug_samples = 100;
  std::filesystem::path output;
};

int cmd_featurize(Context& ctx, const FeaturizeArgs& a) {
  if (a.output.empty()) throw ConfigError("--output is required");
  const Extractor extractor = make_extractor(ctx.cfg.extractor);
  const ImageSubset subset = a.images.subset(ctx.cfg.n_images, ctx.cfg.seed);
  const EmbeddedSubset embedded(extractor, subset);
  FeatureTable table(extractor.fingerprint(), extractor.dim());

  for (const auto& text : a.transforms) {
    TransformSpec t = parse_transform_spec(text, ctx.cfg.seed);
    t.seed = derive(ctx.cfg.seed, "transform", fnv1a64(t.key()));
    table.add(t.key(), featurize_transform(embedded, t, ctx.registry()).feature);
  }
  for (const auto& [name, sev] : corruption_grid(ctx, a.corruptions, a.severities)) {
    const std::string key = name + "/" + std::to_string(sev);
    const Seed seed = derive(ctx.cfg.seed, "center", fnv1a64(key));
    table.add(key, corruption_center(embedded, name, sev, {ctx.cfg.n_corruption_draws, a.paired}, seed, ctx.registry()));
  }
  if (a.powerset) {
    const auto schemes = enumerate_powerset();
    for (int mask : parse_range(a.schemes)) {
      if (mask < 0 || mask >= 512) throw ConfigError("scheme index out of range: " + std::to_string(mask));
      const auto& scheme = schemes[static_cast<std::size_t>(mask)];
      const Seed scheme_seed = derive(ctx.cfg.seed, "powerset", static_cast<std::uint64_t>(mask));
      for (std::size_t i = 0; i < a.aug_samples; ++i) {
        const auto aug = sample_augmentation(scheme, derive(scheme_seed, "draw", i));
        const std::string id = scheme.label() + "/" + std::to_string(i);
        table.add(id, featurize_transform(embedded, aug, id, ctx.registry()).feature);
      }
    }
  }
  write_features(a.output, table);
  *ctx.out << "# wrote " << table.size() << " rows of dim " << table.dim() << " to " << a.output.string() << "\n";
  return ok;
}

struct PairArgs {
  std::filesystem::path samples, centers;
  std::string scheme, center;
};

int cmd_msd(Context& ctx, const PairArgs& a) {
  const FeatureTable st = load_table(a.samples);
  const FeatureView sv = split_features(st, ctx.registry());
  const FeatureView cv = a.centers.empty() ? sv : split_features(load_table(a.centers), ctx.registry());
  *ctx.out << "scheme\tcenter\tmsd\tmmd\targmin\tcount\n";
  for (const auto& [label, group] : sv.groups) {
    if (!a.scheme.empty() && label != a.scheme) continue;
    for (const auto& [cid, center] : cv.centers) {
      if (!a.center.empty() && cid != a.center) continue;
      const DistanceReport r = distance_report(*group.set, center);
      *ctx.out << label << "\t" << cid << "\t" << fmt(r.msd) << "\t" << fmt(r.mmd) << "\t" << group.ids[r.argmin]
               << "\t" << r.count << "\n";
    }
  }
  return ok;
}

struct MmdArgs {
  std::filesystem::path a, b;
  std::string a_prefix, b_prefix;
};

SampleSet rows_with_prefix(const FeatureTable& t, const std::string& prefix) {
  SampleSet s(t.dim(), t.fingerprint());
  for (const auto& r : t.records()) {
    if (r.id.rfind(prefix, 0) == 0) s.add_row(r.values);
  }
  if (s.empty()) throw LookupError("no feature rows with prefix '" + prefix + "'");
  return s;
}

int cmd_mmd(Context& ctx, const MmdArgs& a) {
  const FeatureTable ta = load_table(a.a);
  const FeatureTable tb = a.b.empty() ? ta : load_table(a.b);
  const double v = mmd(rows_with_prefix(ta, a.a_prefix), rows_with_prefix(tb, a.b_prefix));
  *ctx.out << "a\tb\tmmd\n" << a.a_prefix << "\t" << a.b_prefix << "\t" << fmt(v) << "\n";
  return ok;
}

struct CorrelateArgs {
  std::filesystem::path features, errors, plot_data;
};

// scheme -> corruption -> error, from a "scheme,corruption,error" table.
std::map<std::string, std::map<std::string, double>> read_scheme_errors(const std::filesystem::path& path) {
  require_exists(path, "error table");
  std::stringstream in(read_text(path));
  std::string line;
  bool header = false;
  std::map<std::string, std::map<std::string, double>> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_list(line);
    if (!header) {
      if (cells != std::vector<std::string>{"scheme", "corruption", "error"}) {
        throw FormatError("scheme error table must start with 'scheme,corruption,error'");
      }
      header = true;
      continue;
    }
    if (cells.size() != 3) throw FormatError("bad scheme error row: " + line);
    double e = 0;
    try {
      e = std::stod(cells[2]);
    } catch (const std::exception&) {
      throw FormatError("bad error value: " + cells[2]);
    }
    out[cells[1]][cells[0]] = e;
  }
  if (!header) throw FormatError("scheme error table has no header");
  return out;
}

int cmd_correlate(Context& ctx, const CorrelateArgs& a) {
  const auto errors = read_scheme_errors(a.errors);
  std::set<std::string> names;
  for (const auto& [c, _] : errors) names.insert(c);
  const FeatureView view = split_features(load_table(a.features), ctx.registry(), names);
  std::ofstream plot;
  if (!a.plot_data.empty()) {
    plot.open(a.plot_data);
    if (!plot) throw IoError("cannot write " + a.plot_data.string());
    plot << "scheme\tcorruption\tmsd\terror\n";
  }
  *ctx.out << "corruption\tschemes\trho\n";
  for (const auto& [corruption, by_scheme] : errors) {
    std::vector<const FeatureVector*> centers;
    for (const auto& [cid, c] : view.centers) {
      if (cid.substr(0, cid.rfind('/')) == corruption) centers.push_back(&c);
    }
    if (centers.empty()) throw CoverageError("no feature centers for " + corruption);
    std::vector<double> msds, errs;
    for (const auto& [scheme, error] : by_scheme) {
      auto g = view.groups.find(scheme);
      if (g == view.groups.end()) throw CoverageError("no augmentation samples for scheme " + scheme);
      double total = 0;
      for (const auto* c : centers) total += msd(*g->second.set, *c);
      msds.push_back(total / static_cast<double>(centers.size()));
      errs.push_back(error);
      if (plot) plot << scheme << "\t" << corruption << "\t" << fmt(msds.back()) << "\t" << fmt(error) << "\n";
    }
    std::string rho = "nan";
    try {
      rho = fmt(spearman(msds, errs));
    } catch (const UndefinedError&) {
    } catch (const DomainError&) {
    }
    *ctx.out << corruption << "\t" << msds.size() << "\t" << rho << "\n";
  }
  return ok;
}

struct RankArgs {
  std::filesystem::path samples, centers;
  std::string corruptions;
  std::size_t k = 0;
  std::string mode = "closest";
};

std::pair<SampleSet, std::vector<std::string>> all_samples(const FeatureView& v, std::size_t dim, const std::string& fp) {
  SampleSet s(dim, fp);
  std::vector<std::string> ids;
  for (const auto& [_, g] : v.groups) {
    for (std::size_t i = 0; i < g.ids.size(); ++i) {
      s.add_row(std::span<const double>(g.set->row(i), dim));
      ids.push_back(g.ids[i]);
    }
  }
  return {std::move(s), std::move(ids)};
}

std::vector<FeatureVector> selected_centers(const FeatureView& v, const std::string& filter) {
  std::set<std::string> wanted;
  for (const auto& n : split_list(filter)) wanted.insert(n);
  std::vector<FeatureVector> out;
  for (const auto& [cid, c] : v.centers) {
    if (wanted.empty() || wanted.contains(cid) || wanted.contains(cid.substr(0, cid.rfind('/')))) out.push_back(c);
  }
  if (out.empty()) throw CoverageError("no corruption centers selected");
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::string>> ranked(const Context& ctx, const RankArgs& a) {
  const FeatureTable st = load_table(a.samples);
  const FeatureView sv = split_features(st, ctx.registry());
  const FeatureView cv = a.centers.empty() ? sv : split_features(load_table(a.centers), ctx.registry());
  auto [set, ids] = all_samples(sv, st.dim(), st.fingerprint());
  if (set.empty()) throw CoverageError("no augmentation samples in " + a.samples.string());
  const auto centers = selected_centers(cv, a.corruptions);
  return {rank_augmentations(set, centers), std::move(ids)};
}

int cmd_rank(Context& ctx, const RankArgs& a) {
  const auto [order, ids] = ranked(ctx, a);
  *ctx.out << "rank\tid\n";
  for (std::size_t i = 0; i < order.size(); ++i) *ctx.out << i << "\t" << ids[order[i]] << "\n";
  return ok;
}

int cmd_subset(Context& ctx, const RankArgs& a) {
  const auto [order, ids] = ranked(ctx, a);
  const auto picks = select_subset(order, a.k, parse_subset_mode(a.mode), ctx.cfg.seed);
  *ctx.out << "id\n";
  for (auto i : picks) *ctx.out << ids[i] << "\n";
  return ok;
}

struct ProbeArgs {
  ImageSource images;
  std::string corruption;
  int severity = 3;
  std::size_t repeats = 10;
};

int cmd_variance_probe(Context& ctx, const ProbeArgs& a) {
  const Extractor extractor = make_extractor(ctx.cfg.extractor);
  const ImageSubset pool = a.images.pool(ctx.cfg.seed);
  VarianceProbeOptions opts{ctx.cfg.n_images, ctx.cfg.n_corruption_draws, a.repeats};
  const auto r = variance_probe(extractor, a.corruption, a.severity, pool, opts, ctx.cfg.seed, ctx.registry());
  *ctx.out << "repeat\tdistance\n";
  for (std::size_t i = 0; i < r.distances.size(); ++i) *ctx.out << i << "\t" << fmt(r.distances[i]) << "\n";
  *ctx.out << "# mean=" << fmt(r.mean) << " stddev=" << fmt(r.stddev) << " percent=" << fmt(r.percent) << "\n";
  return ok;
}

struct BuildArgs {
  std::filesystem::path new_errors, reference_errors, features, render_from;
  std::optional<double> spread_target;
  std::size_t runs = 10;
  std::size_t k = 10;
};

int cmd_build_benchmark(Context& ctx, const BuildArgs& a) {
  require_exists(a.new_errors, "new-corruption error table");
  require_exists(a.reference_errors, "reference error table");
  if (ctx.cfg.output.empty()) throw ConfigError("--output is required");
  BuildInputs in{ErrorTable::load(a.new_errors), ErrorTable::load(a.reference_errors), {}, {}};
  const auto ref_names = in.reference_errors.corruptions();
  const auto new_names = in.new_errors.corruptions();
  const std::set<std::string> refs(ref_names.begin(), ref_names.end());
  std::set<std::string> names(new_names.begin(), new_names.end());
  names.insert(ref_names.begin(), ref_names.end());
  const FeatureView view = split_features(load_table(a.features), ctx.registry(), names);
  for (const auto& [cid, c] : view.centers) {
    const auto slash = cid.rfind('/');
    const std::string name = cid.substr(0, slash);
    if (refs.contains(name)) {
      in.reference_centers.push_back(c);
    } else {
      in.new_centers.emplace(std::make_pair(name, std::stoi(cid.substr(slash + 1))), c);
    }
  }
  BuildOptions opts;
  opts.tolerance = ctx.cfg.tolerance;
  opts.band = ctx.cfg.band;
  opts.spread_target = a.spread_target;
  opts.n_candidates = ctx.cfg.n_candidates;
  opts.runs = a.runs;
  opts.k = a.k;
  const BuildResult r = build_benchmark(in, opts, ctx.cfg.seed);

  std::filesystem::create_directories(ctx.cfg.output);
  std::ostringstream bench;
  bench << "corruption\tcenter\tseverities\terror\n";
  for (const auto& g : r.benchmark.groups) {
    const auto s = g.severities();
    bench << g.corruption << "\t" << g.center << "\t" << s[0] << "-" << s[4] << "\t" << fmt(g.error) << "\n";
  }
  std::ofstream(ctx.cfg.output / "benchmark.tsv") << bench.str();
  std::ofstream rank(ctx.cfg.output / "ranking.tsv");
  rank << "rank\tcorruption\tnormalized\traw\tmembers\n";
  for (std::size_t i = 0; i < r.ranking.entries.size(); ++i) {
    const auto& e = r.ranking.entries[i];
    rank << i << "\t" << e.corruption << "\t" << fmt(e.normalized) << "\t" << fmt(e.raw) << "\t" << e.members << "\n";
  }
  if (!rank) throw IoError("cannot write under " + ctx.cfg.output.string());

  *ctx.out << bench.str();
  *ctx.out << "# avg_error=" << fmt(r.benchmark.avg_error) << " reference_avg=" << fmt(r.reference_avg)
           << " distance=" << fmt(r.distance) << " candidates=" << r.candidates << " groups=" << r.groups
           << (r.shortfall ? " shortfall" : "") << (r.resampled ? " resampled" : "") << "\n";

  if (!a.render_from.empty()) {
    require_exists(a.render_from, "render input directory");
    std::vector<TransformSpec> specs;
    for (const auto& g : r.benchmark.groups) {
      for (int s : g.severities()) specs.push_back({g.corruption, {}, s, ctx.cfg.seed});
    }
    render_dataset(a.render_from, specs, ctx.cfg.output / "rendered", ctx.cfg.seed, ctx.registry());
  }
  return ok;
}

struct ToyArgs {
  ToyMixOptions opts;
  std::string alphas;
  std::filesystem::path features;
  std::string target, other;
};

int cmd_toy_mix(Context& ctx, ToyArgs a) {
  if (!a.alphas.empty()) {
    a.opts.alphas.clear();
    for (const auto& s : split_list(a.alphas)) {
      try {
        a.opts.alphas.push_back(std::stod(s));
      } catch (const std::exception&) {
        throw ConfigError("bad mixing fraction '" + s + "'");
      }
    }
  }
  std::vector<ToyMixRow> rows;
  if (!a.features.empty()) {
    if (a.target.empty() || a.other.empty()) throw ConfigError("--target and --other prefixes are required");
    const FeatureTable t = load_table(a.features);
    rows = toy_mix(rows_with_prefix(t, a.target), rows_with_prefix(t, a.other), a.opts.alphas, a.opts.samples,
                   ctx.cfg.seed);
  } else {
    rows = toy_mix(a.opts, ctx.cfg.seed);
  }
  *ctx.out << "alpha\tmmd\tmsd\tanalytic_mmd\n";
  for (const auto& r : rows) {
    *ctx.out << fmt(r.alpha) << "\t" << fmt(r.mmd) << "\t" << fmt(r.msd) << "\t" << fmt(r.analytic_mmd) << "\n";
  }
  try {
    *ctx.out << "# r2=" << fmt(analytic_r_squared(rows)) << "\n";
  } catch (const Error&) {
  }
  return ok;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const FeasibilityError*>(&e) || dynamic_cast<const CompositionError*>(&e)) return feasibility_error;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const RegistryError*>(&e) ||
      dynamic_cast<const DomainError*>(&e)) {
    return config_error;
  }
  return data_error;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{{}, std::nullopt, &out, &err};
  RunConfig& cfg = ctx.cfg;
  CLI::App app{"Transform-distance toolkit: render corruptions, embed transforms, measure MSD/MMD, build benchmarks"};
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Global seed");
  app.add_option("--jobs", cfg.jobs, "Worker threads (0 = all)");
  app.add_option("--severity-config", cfg.severity_config, "Severity table overriding the built-in one");
  app.add_option("--extractor", cfg.extractor, "'builtin' or a CBF1 feature file");
  app.add_option("--subset-size", cfg.n_images, "Images per featurization subset");
  app.add_option("--corruption-samples", cfg.n_corruption_draws, "Corruption draws per center");
  app.add_option("--candidates", cfg.n_candidates, "Candidate benchmarks per run");
  app.add_option("--tolerance", cfg.tolerance, "Allowed gap to the reference average error, in points");
  app.add_option("--band", cfg.band, "Relative band around the severity spread target");
  app.add_option("--output", cfg.output, "Output path");

  RenderArgs render;
  auto* c_render = app.add_subcommand("render", "Write corrupted copies of a dataset");
  c_render->add_option("--input", render.input, "Directory of clean PNG images")->required();
  c_render->add_option("--corruptions", render.corruptions, "reference, cbar, all, none or a comma list");
  c_render->add_option("--severities", render.severities, "Severities, e.g. 1-5");
  c_render->add_option("--transform", render.transforms, "Extra transform, name:severity:key=value,...");

  FeaturizeArgs feat;
  auto* c_feat = app.add_subcommand("featurize", "Write transform features to a CBF1 file");
  feat.images.add_options(c_feat);
  c_feat->add_option("--transform", feat.transforms, "Transform to featurize (identity allowed)");
  c_feat->add_option("--corruptions", feat.corruptions, "Corruption centers: reference, cbar, all or a list");
  c_feat->add_option("--severities", feat.severities, "Severities of the centers");
  c_feat->add_flag("--paired", feat.paired, "Pair each corruption draw with a single image");
  c_feat->add_flag("--powerset", feat.powerset, "Featurize samples of the augmentation powerset schemes");
  c_feat->add_option("--schemes", feat.schemes, "Powerset scheme indices, e.g. 0-511");
  c_feat->add_option("--aug-samples", feat.aug_samples, "Samples per powerset scheme")->check(CLI::PositiveNumber);

  PairArgs pair;
  auto* c_msd = app.add_subcommand("msd", "Minimal sample distance per scheme and corruption center");
  c_msd->add_option("--samples", pair.samples, "CBF1 file with augmentation samples")->required();
  c_msd->add_option("--centers", pair.centers, "CBF1 file with corruption centers (default: --samples)");
  c_msd->add_option("--scheme", pair.scheme, "Only this scheme label");
  c_msd->add_option("--center", pair.center, "Only this center, name/severity");

  MmdArgs mm;
  auto* c_mmd = app.add_subcommand("mmd", "Distance between the mean features of two row sets");
  c_mmd->add_option("--a", mm.a, "CBF1 file")->required();
  c_mmd->add_option("--b", mm.b, "CBF1 file (default: --a)");
  c_mmd->add_option("--a-prefix", mm.a_prefix, "Id prefix selecting rows of a");
  c_mmd->add_option("--b-prefix", mm.b_prefix, "Id prefix selecting rows of b");

  CorrelateArgs corr;
  auto* c_corr = app.add_subcommand("correlate", "Spearman correlation of MSD and error per corruption");
  c_corr->add_option("--features", corr.features, "CBF1 file with samples and centers")->required();
  c_corr->add_option("--errors", corr.errors, "Table with header scheme,corruption,error")->required();
  c_corr->add_option("--plot-data", corr.plot_data, "Write per-point scheme/corruption/msd/error rows here");

  RankArgs rank;
  auto* c_rank = app.add_subcommand("rank-augs", "Round-robin ranking of augmentation samples by distance");
  auto* c_subset = app.add_subcommand("subset", "Select k ranked augmentation samples");
  for (auto* c : {c_rank, c_subset}) {
    c->add_option("--samples", rank.samples, "CBF1 file with augmentation samples")->required();
    c->add_option("--centers", rank.centers, "CBF1 file with corruption centers (default: --samples)");
    c->add_option("--corruptions", rank.corruptions, "Comma list of corruptions or name/severity centers");
  }
  c_subset->add_option("--k", rank.k, "Number of samples")->required();
  c_subset->add_option("--mode", rank.mode, "closest, farthest or random");

  ProbeArgs probe;
  auto* c_probe = app.add_subcommand("variance-probe", "Spread of an augmentation-to-center distance over redraws");
  probe.images.add_options(c_probe);
  c_probe->add_option("--corruption", probe.corruption, "Corruption name")->required();
  c_probe->add_option("--severity", probe.severity, "Severity");
  c_probe->add_option("--repeats", probe.repeats, "Independent redraws (>= 2)");

  BuildArgs build;
  auto* c_build = app.add_subcommand("build-benchmark", "Pick new corruptions far from a reference benchmark");
  c_build->add_option("--new-errors", build.new_errors, "Error table of new corruptions, severities 1-10")->required();
  c_build->add_option("--reference-errors", build.reference_errors, "Error table of the reference benchmark")
      ->required();
  c_build->add_option("--features", build.features, "CBF1 file with name/severity centers of both sets")->required();
  c_build->add_option("--spread-target", build.spread_target, "Severity spread target (default: reference mean)");
  c_build->add_option("--runs", build.runs, "Repeated sampling rounds averaged in the ranking");
  c_build->add_option("--k", build.k, "Corruptions in the benchmark");
  c_build->add_option("--render-from", build.render_from, "Render the chosen benchmark from this dataset");

  ToyArgs toy;
  auto* c_toy = app.add_subcommand("toy-mix", "MMD and MSD of a two-cluster mixture as the mixing fraction varies");
  c_toy->add_option("--dim", toy.opts.dim, "Feature dimension");
  c_toy->add_option("--samples", toy.opts.samples, "Augmentation samples per mixing fraction");
  c_toy->add_option("--separation", toy.opts.separation, "Distance between cluster means");
  c_toy->add_option("--sigma", toy.opts.sigma, "Cluster standard deviation");
  c_toy->add_option("--alphas", toy.alphas, "Comma list of mixing fractions");
  c_toy->add_option("--features", toy.features, "Use rows of this CBF1 file instead of synthetic clusters");
  c_toy->add_option("--target", toy.target, "Id prefix of target corruption rows");
  c_toy->add_option("--other", toy.other, "Id prefix of the other corruption rows");

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) rest.pop_back();
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_error;
  }

  try {
    cfg.seed = Seed{seed};
    cfg.seed_given = seed_opt->count() > 0;
    cfg.validate();
    if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);
    if (!cfg.severity_config.empty()) ctx.custom.emplace(Registry::with_severity_config(read_text(cfg.severity_config)));

    if (c_render->parsed()) {
      if (render.input.empty()) throw ConfigError("--input is required");
      render.output = cfg.output;
      return cmd_render(ctx, render);
    }
    if (c_feat->parsed()) {
      feat.output = cfg.output;
      return cmd_featurize(ctx, feat);
    }
    if (c_msd->parsed()) return cmd_msd(ctx, pair);
    if (c_mmd->parsed()) return cmd_mmd(ctx, mm);
    if (c_corr->parsed()) return cmd_correlate(ctx, corr);
    if (c_rank->parsed()) return cmd_rank(ctx, rank);
    if (c_subset->parsed()) return cmd_subset(ctx, rank);
    if (c_probe->parsed()) return cmd_variance_probe(ctx, probe);
    if (c_build->parsed()) return cmd_build_benchmark(ctx, build);
    if (c_toy->parsed()) return cmd_toy_mix(ctx, toy);
  } catch (const FeasibilityError& e) {
    err << "error: " << e.what() << "\n";
    return feasibility_error;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return data_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return config_error;
}

}  // namespace augdist::cli
