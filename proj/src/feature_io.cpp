#include "augdist/feature_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "augdist/errors.hpp"

namespace augdist {

FeatureTable::FeatureTable(std::string fingerprint, std::size_t dim) : fingerprint_(std::move(fingerprint)), dim_(dim) {}

void FeatureTable::add(std::string id, std::vector<double> values) {
  if (values.size() != dim_) {
    throw FormatError("feature '" + id + "' has dim " + std::to_string(values.size()) + ", table dim is " +
                      std::to_string(dim_));
  }
  if (index_.contains(id)) throw FormatError("duplicate feature id '" + id + "'");
  index_.emplace(id, records_.size());
  records_.push_back({std::move(id), std::move(values)});
}

void FeatureTable::add(std::string id, const FeatureVector& v) {
  if (!fingerprint_.empty() && !v.fingerprint.empty() && v.fingerprint != fingerprint_) {
    throw FingerprintError("feature '" + id + "' has fingerprint " + v.fingerprint + ", table has " + fingerprint_);
  }
  add(std::move(id), v.values);
}

const FeatureRecord* FeatureTable::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &records_[it->second];
}

FeatureVector FeatureTable::vector(std::string_view id) const {
  const FeatureRecord* r = find(id);
  if (!r) throw LookupError("no feature row for id '" + std::string(id) + "'");
  return {r->values, fingerprint_};
}

namespace {

template <class T>
void put(std::string& out, T v) {
  static_assert(std::is_unsigned_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_string(std::string& out, std::string_view s) {
  put(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const noexcept { return pos_ == bytes_.size(); }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("feature file truncated");
  }
  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t feature_file_size(const FeatureTable& table) {
  std::size_t n = 4 + 4 + 8 + 4 + table.fingerprint().size();
  for (const auto& r : table.records()) n += 4 + r.id.size();
  return n + table.size() * table.dim() * 4;
}

void write_features(const std::filesystem::path& path, const FeatureTable& table) {
  std::string out;
  out.reserve(feature_file_size(table));
  out.append("CBF1");
  put(out, static_cast<std::uint32_t>(table.dim()));
  put(out, static_cast<std::uint64_t>(table.size()));
  put_string(out, table.fingerprint());
  for (const auto& r : table.records()) put_string(out, r.id);
  for (const auto& r : table.records()) {
    for (double v : r.values) put(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

FeatureTable read_features(const std::filesystem::path& path, std::optional<std::size_t> expected_dim) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  Reader in(std::string(std::istreambuf_iterator<char>(f), {}));
  char magic[4];
  for (auto& c : magic) c = static_cast<char>(in.get<std::uint8_t>());
  if (std::memcmp(magic, "CBF1", 4) != 0) throw FormatError(path.string() + ": not a CBF1 file");
  const auto dim = in.get<std::uint32_t>();
  const auto count = in.get<std::uint64_t>();
  if (expected_dim && *expected_dim != dim) {
    throw FormatError(path.string() + ": dim " + std::to_string(dim) + ", expected " + std::to_string(*expected_dim));
  }
  FeatureTable table(in.get_string(), dim);
  // Each id needs at least its 4-byte length prefix.
  if (count > in.remaining() / 4) throw FormatError("feature file truncated");
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) ids.push_back(in.get_string());
  if (in.remaining() != count * dim * 4) {
    throw FormatError(path.string() + ": payload size does not match dim * count");
  }
  for (auto& id : ids) {
    std::vector<double> values(dim);
    for (auto& v : values) v = std::bit_cast<float>(in.get<std::uint32_t>());
    table.add(std::move(id), std::move(values));
  }
  return table;
}

}  // namespace augdist
