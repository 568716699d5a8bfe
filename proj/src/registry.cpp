#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "augdist/errors.hpp"
#include "augdist/transforms.hpp"

namespace augdist {

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::augmentation: return "augmentation";
    case TransformKind::corruption_reference: return "corruption-reference";
    case TransformKind::corruption_cbar: return "corruption-cbar";
  }
  return "unknown";
}

std::string TransformSpec::key() const {
  return severity ? name + "/" + std::to_string(*severity) : name;
}

double ParamSet::get(std::string_view name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw DomainError("missing transform parameter: " + std::string(name));
  return it->second;
}

int ParamSet::get_int(std::string_view name) const { return static_cast<int>(std::lround(get(name))); }

double ParamSet::length(std::string_view name, const ImageBuffer& img) const {
  return get(name) * std::min(img.height(), img.width()) / 32.0;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view token, std::string_view context) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ConfigError("bad number '" + std::string(token) + "' in " + std::string(context));
  }
  return value;
}

}  // namespace

SeverityTable parse_severity_config(std::string_view text) {
  SeverityTable table;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "severity config line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header at " + where);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError("empty section name at " + where);
      table[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = values' at " + where);
    if (section.empty()) throw ConfigError("parameter outside a section at " + where);
    const std::string key(trim(line.substr(0, eq)));
    std::string_view rest = trim(line.substr(eq + 1));
    std::vector<double> values;
    while (!rest.empty()) {
      const auto sp = rest.find_first_of(" \t");
      values.push_back(parse_number(rest.substr(0, sp), where));
      rest = sp == std::string_view::npos ? std::string_view{} : trim(rest.substr(sp));
    }
    if (key.empty() || values.empty()) throw ConfigError("empty key or value list at " + where);
    table[section][key] = std::move(values);
  }
  return table;
}

Registry::Registry(SeverityTable table) : table_(std::move(table)) {
  for (auto* make : {&detail::augmentation_entries, &detail::reference_corruption_entries,
                     &detail::cbar_corruption_entries}) {
    for (auto& e : make()) entries_.push_back(std::move(e));
  }
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    if (!seen.insert(e.name).second) throw RegistryError("duplicate registry name: " + e.name);
    if (e.kind == TransformKind::augmentation) continue;
    auto sec = table_.find(e.name);
    if (sec == table_.end()) throw ConfigError("severity table has no section for " + e.name);
    const auto levels = static_cast<std::size_t>(e.max_severity - e.min_severity + 1);
    for (const auto& range : e.params) {
      auto p = sec->second.find(range.name);
      if (p == sec->second.end()) throw ConfigError("severity table misses " + e.name + "." + range.name);
      auto& values = p->second;
      if (values.size() == 1) values.assign(levels, values.front());
      if (values.size() != levels) {
        throw ConfigError(e.name + "." + range.name + ": expected " + std::to_string(levels) + " values");
      }
      for (double v : values) {
        if (v < range.lo || v > range.hi) {
          throw ConfigError(e.name + "." + range.name + ": value out of documented range");
        }
      }
    }
    for (const auto& [key, _] : sec->second) {
      const bool known = std::any_of(e.params.begin(), e.params.end(),
                                     [&](const ParamRange& r) { return r.name == key; });
      if (!known) throw ConfigError("unknown parameter " + e.name + "." + key);
    }
  }
  for (const auto& [name, _] : table_) {
    if (!seen.count(name)) throw ConfigError("severity table section for unknown corruption: " + name);
  }
}

const Registry& Registry::builtin() {
  static const Registry registry(parse_severity_config(default_severity_config()));
  return registry;
}

Registry Registry::with_severity_config(std::string_view text) {
  // Sections and parameters not named in `text` keep their shipped values.
  SeverityTable table = parse_severity_config(default_severity_config());
  for (auto& [name, params] : parse_severity_config(text)) {
    auto& section = table[name];
    for (auto& [param, values] : params) section[param] = std::move(values);
  }
  return Registry(std::move(table));
}

const RegistryEntry& Registry::find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e;
  }
  throw RegistryError("unknown transform: " + std::string(name));
}

bool Registry::contains(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const RegistryEntry& e) { return e.name == name; });
}

std::vector<RegistryListing> Registry::list() const {
  std::vector<RegistryListing> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back({e.name, e.kind, e.min_severity, e.max_severity});
  return out;
}

std::vector<std::string> Registry::names(TransformKind kind) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.kind == kind) out.push_back(e.name);
  }
  return out;
}

Params Registry::resolve(const TransformSpec& spec) const {
  if (spec.name == "identity") {
    if (spec.severity) throw DomainError("identity takes no severity");
    return {};
  }
  const auto& e = find(spec.name);
  Params merged;
  if (e.kind == TransformKind::augmentation) {
    if (spec.severity) throw DomainError(spec.name + " is an augmentation and takes no severity");
  } else {
    if (!spec.severity) throw DomainError(spec.name + " requires a severity");
    const int s = *spec.severity;
    if (s < e.min_severity || s > e.max_severity) {
      throw DomainError(spec.name + ": severity " + std::to_string(s) + " outside [" +
                        std::to_string(e.min_severity) + ", " + std::to_string(e.max_severity) + "]");
    }
    for (const auto& [key, values] : table_.at(e.name)) {
      merged[key] = values[static_cast<std::size_t>(s - e.min_severity)];
    }
  }
  for (const auto& [key, value] : spec.params) merged[key] = value;
  for (const auto& range : e.params) {
    auto it = merged.find(range.name);
    if (it == merged.end()) throw DomainError(spec.name + ": missing parameter " + range.name);
    const double v = it->second;
    if (!std::isfinite(v) || v < range.lo || v > range.hi) {
      throw DomainError(spec.name + "." + range.name + " outside its documented range");
    }
    if (range.integer && v != std::round(v)) throw DomainError(spec.name + "." + range.name + " must be integral");
  }
  for (const auto& [key, _] : merged) {
    const bool known = std::any_of(e.params.begin(), e.params.end(),
                                   [&](const ParamRange& r) { return r.name == key; });
    if (!known) throw DomainError(spec.name + ": unknown parameter " + key);
  }
  return merged;
}

ImageBuffer Registry::apply(const TransformSpec& spec, const ImageBuffer& img) const {
  auto params = resolve(spec);
  if (spec.name == "identity") return img;
  if (!img.valid()) throw DomainError("apply_transform: input image has values outside [0, 1]");
  const auto& e = find(spec.name);
  Rng rng(derive(spec.seed, e.name));
  ImageBuffer out = e.fn(img, ParamSet(std::move(params)), rng);
  if (!out.same_shape(img)) throw SizeError(spec.name + " changed the image geometry");
  out.clamp();
  return out;
}

std::vector<RegistryListing> registry_list() { return Registry::builtin().list(); }

ImageBuffer apply_transform(const TransformSpec& spec, const ImageBuffer& img) {
  return Registry::builtin().apply(spec, img);
}

TransformSpec parse_transform_spec(std::string_view text, Seed seed) {
  TransformSpec spec;
  spec.seed = seed;
  const auto first = text.find(':');
  spec.name = std::string(trim(text.substr(0, first)));
  if (spec.name.empty()) throw ConfigError("empty transform name in '" + std::string(text) + "'");
  if (first == std::string_view::npos) return spec;
  std::string_view rest = text.substr(first + 1);
  const auto second = rest.find(':');
  const auto sev = trim(rest.substr(0, second));
  if (!sev.empty()) spec.severity = static_cast<int>(parse_number(sev, text));
  if (second == std::string_view::npos) return spec;
  std::string_view kvs = rest.substr(second + 1);
  while (!kvs.empty()) {
    const auto comma = kvs.find(',');
    const auto kv = trim(kvs.substr(0, comma));
    kvs = comma == std::string_view::npos ? std::string_view{} : kvs.substr(comma + 1);
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value in '" + std::string(text) + "'");
    spec.params[std::string(trim(kv.substr(0, eq)))] = parse_number(trim(kv.substr(eq + 1)), text);
  }
  return spec;
}

}  // namespace augdist
