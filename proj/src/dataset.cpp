#include "ssfair/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "ssfair/errors.hpp"
#include "ssfair/format.hpp"
#include "ssfair/rng.hpp"

namespace ssfair {

namespace {

constexpr int kAgeBoundaries[] = {18, 25, 30, 35, 40, 45, 50, 55, 60, 65};
constexpr size_t kNumAgeBuckets = 11;

// Categorical columns in encoding order; age buckets and the three
// standardized continuous columns follow them.
constexpr std::array<const char*, 8> kCatNames = {
    "workclass", "education", "marital-status", "occupation",
    "relationship", "race", "sex", "native-country"};

const std::string& cat_field(const RawRecord& r, size_t j) {
  switch (j) {
    case 0: return r.workclass;
    case 1: return r.education;
    case 2: return r.marital_status;
    case 3: return r.occupation;
    case 4: return r.relationship;
    case 5: return r.race;
    case 6: return r.sex;
    default: return r.native_country;
  }
}

double cont_field(const RawRecord& r, size_t j) {
  switch (j) {
    case 0: return r.capital_gain;
    case 1: return r.capital_loss;
    default: return r.hours_per_week;
  }
}

constexpr std::array<const char*, 3> kContNames = {
    "capital-gain_z", "capital-loss_z", "hours-per-week_z"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view s, const std::filesystem::path& file, size_t line_no) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw DataError(file.string() + ":" + std::to_string(line_no) +
                    ": expected a number, got '" + std::string(s) + "'");
  return v;
}

Dataset subset(const Dataset& d, const std::vector<size_t>& idx) {
  Dataset out;
  out.n_features = d.n_features;
  out.feature_names = d.feature_names;
  out.x.reserve(idx.size() * d.n_features);
  out.y.reserve(idx.size());
  out.protected_attr.reserve(idx.size());
  for (size_t i : idx) out.append_row(d, i);
  return out;
}

}  // namespace

size_t Dataset::count_labeled() const {
  size_t c = 0;
  for (int8_t v : y) c += (v != kUnlabeled);
  return c;
}

size_t Dataset::count_unlabeled() const { return y.size() - count_labeled(); }

void Dataset::append_row(const Dataset& src, size_t i) {
  x.insert(x.end(), src.row(i), src.row(i) + src.n_features);
  y.push_back(src.y[i]);
  protected_attr.push_back(src.protected_attr[i]);
}

std::vector<RawRecord> load_raw(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());

  std::vector<RawRecord> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '|') continue;

    auto f = split_fields(sv);
    if (!f.empty() && f[0] == "age") continue;  // header row from a CSV export
    if (f.size() != 15)
      throw DataError(file.string() + ":" + std::to_string(line_no) +
                      ": expected 15 fields, got " + std::to_string(f.size()));

    // Columns 2 (fnlwgt) and 4 (education-num) are dropped; "?" there would
    // not disqualify a row, but the official files never have that anyway.
    bool missing = false;
    for (size_t j = 0; j < 15 && !missing; ++j) {
      if (j == 2 || j == 4) continue;
      missing = (f[j] == "?");
    }
    if (missing) continue;

    RawRecord r;
    r.age = static_cast<int>(parse_number(f[0], file, line_no));
    r.workclass = std::string(f[1]);
    r.education = std::string(f[3]);
    r.marital_status = std::string(f[5]);
    r.occupation = std::string(f[6]);
    r.relationship = std::string(f[7]);
    r.race = std::string(f[8]);
    r.sex = std::string(f[9]);
    r.capital_gain = parse_number(f[10], file, line_no);
    r.capital_loss = parse_number(f[11], file, line_no);
    r.hours_per_week = parse_number(f[12], file, line_no);
    r.native_country = std::string(f[13]);

    std::string_view label = f[14];
    if (!label.empty() && label.back() == '.') label.remove_suffix(1);  // test-file form
    if (label == ">50K")
      r.label = 1;
    else if (label == "<=50K")
      r.label = 0;
    else
      throw DataError(file.string() + ":" + std::to_string(line_no) +
                      ": unrecognized label '" + std::string(label) + "'");
    out.push_back(std::move(r));
  }
  return out;
}

int bucketize_age(int age) {
  int b = 0;
  for (int bound : kAgeBoundaries) {
    if (age >= bound) ++b;
  }
  return b;
}

void Encoder::fit(const std::vector<RawRecord>& records) {
  if (records.empty()) throw DataError("cannot fit an encoder on zero records");

  vocabs_.assign(kCatNames.size(), {});
  for (size_t j = 0; j < kCatNames.size(); ++j) {
    auto& vocab = vocabs_[j];
    for (const auto& r : records) vocab.push_back(cat_field(r, j));
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  }

  for (size_t j = 0; j < 3; ++j) {
    double sum = 0;
    for (const auto& r : records) sum += cont_field(r, j);
    const double mean = sum / static_cast<double>(records.size());
    double ss = 0;
    for (const auto& r : records) {
      const double d = cont_field(r, j) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(records.size()));
    cont_mean_[j] = mean;
    cont_std_[j] = sd > 0 ? sd : 1.0;  // constant column would encode as zeros
  }

  names_.clear();
  for (size_t j = 0; j < kCatNames.size(); ++j)
    for (const auto& v : vocabs_[j])
      names_.push_back(std::string(kCatNames[j]) + "=" + v);
  // Feature names must stay comma-free for the CSV-style dataset header.
  names_.push_back("age=[0-18)");
  for (size_t b = 0; b + 1 < std::size(kAgeBoundaries); ++b)
    names_.push_back("age=[" + std::to_string(kAgeBoundaries[b]) + "-" +
                     std::to_string(kAgeBoundaries[b + 1]) + ")");
  names_.push_back("age=[65-inf)");
  for (const char* n : kContNames) names_.push_back(n);
}

Dataset Encoder::transform(const std::vector<RawRecord>& records) const {
  if (!fitted()) throw DataError("encoder used before fit");

  Dataset d;
  d.n_features = names_.size();
  d.feature_names = names_;
  d.x.assign(records.size() * d.n_features, 0.0);
  d.y.resize(records.size());
  d.protected_attr.resize(records.size());

  for (size_t i = 0; i < records.size(); ++i) {
    const RawRecord& r = records[i];
    double* row = d.x.data() + i * d.n_features;
    size_t base = 0;
    for (size_t j = 0; j < kCatNames.size(); ++j) {
      const auto& vocab = vocabs_[j];
      const std::string& v = cat_field(r, j);
      auto it = std::lower_bound(vocab.begin(), vocab.end(), v);
      if (it == vocab.end() || *it != v)
        throw DataError("category '" + v + "' in column " + kCatNames[j] +
                        " was not present when the encoder was fit");
      row[base + static_cast<size_t>(it - vocab.begin())] = 1.0;
      base += vocab.size();
    }
    row[base + static_cast<size_t>(bucketize_age(r.age))] = 1.0;
    base += kNumAgeBuckets;
    for (size_t j = 0; j < 3; ++j)
      row[base + j] = (cont_field(r, j) - cont_mean_[j]) / cont_std_[j];

    d.y[i] = r.label;
    d.protected_attr[i] = (r.sex == "Female") ? 1 : 0;
  }
  return d;
}

Dataset encode(const std::vector<RawRecord>& records) {
  Encoder enc;
  enc.fit(records);
  return enc.transform(records);
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction <= 1.0))
    throw ConfigError("train fraction must be in (0,1], got " + format_double(spec.train_fraction));

  const size_t n = dataset.n_rows();
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  Rng rng(spec.seed);
  deterministic_shuffle(perm, rng);

  const size_t n_train = static_cast<size_t>(spec.train_fraction * static_cast<double>(n));
  std::vector<size_t> train_idx(perm.begin(), perm.begin() + n_train);
  std::vector<size_t> test_idx(perm.begin() + n_train, perm.end());
  return {subset(dataset, train_idx), subset(dataset, test_idx)};
}

Dataset mask_labels(const Dataset& train, size_t n_labeled, uint64_t seed) {
  if (n_labeled > train.n_rows())
    throw ConfigError("n_labeled " + std::to_string(n_labeled) + " exceeds train size " +
                      std::to_string(train.n_rows()));
  Rng rng(seed);
  const auto keep = sample_without_replacement(train.n_rows(), n_labeled, rng);
  std::vector<uint8_t> keep_mask(train.n_rows(), 0);
  for (size_t i : keep) keep_mask[i] = 1;

  Dataset out = train;
  for (size_t i = 0; i < out.n_rows(); ++i)
    if (!keep_mask[i]) out.y[i] = kUnlabeled;
  return out;
}

void write_dataset(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no newline translation
  if (!out) throw DataError("cannot write " + path.string());

  std::string line;
  for (const auto& name : d.feature_names) {
    if (name.find(',') != std::string::npos)
      throw InternalError("feature name '" + name + "' would corrupt the header");
    line += name;
    line += ',';
  }
  line += "label,protected\n";
  out << line;

  for (size_t i = 0; i < d.n_rows(); ++i) {
    line.clear();
    const double* row = d.row(i);
    for (size_t j = 0; j < d.n_features; ++j) {
      line += format_double(row[j]);
      line += ',';
    }
    line += (d.y[i] == kUnlabeled) ? 'u' : static_cast<char>('0' + d.y[i]);
    line += ',';
    line += d.protected_attr[i] ? 'p' : 'n';
    line += '\n';
    out << line;
  }
  if (!out) throw DataError("write failed for " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty dataset file");
  auto header = split_fields(trim(line));
  if (header.size() < 3 || header[header.size() - 2] != "label" || header.back() != "protected")
    throw DataError(path.string() + ": header must end with label,protected");

  Dataset d;
  d.n_features = header.size() - 2;
  d.feature_names.reserve(d.n_features);
  for (size_t j = 0; j < d.n_features; ++j) d.feature_names.emplace_back(header[j]);

  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    auto f = split_fields(sv);
    if (f.size() != d.n_features + 2)
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(d.n_features + 2) + " fields, got " +
                      std::to_string(f.size()));
    for (size_t j = 0; j < d.n_features; ++j)
      d.x.push_back(parse_number(f[j], path, line_no));

    std::string_view lab = f[d.n_features];
    if (lab == "u")
      d.y.push_back(kUnlabeled);
    else if (lab == "0" || lab == "1")
      d.y.push_back(static_cast<int8_t>(lab[0] - '0'));
    else
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": label must be 0, 1 or u");

    std::string_view prot = f[d.n_features + 1];
    if (prot == "p")
      d.protected_attr.push_back(1);
    else if (prot == "n")
      d.protected_attr.push_back(0);
    else
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": protected must be p or n");
  }
  return d;
}

}  // namespace ssfair
