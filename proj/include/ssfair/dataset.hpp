#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ssfair {

// Label values: 0, 1, or kUnlabeled.
inline constexpr int8_t kUnlabeled = -1;

struct Dataset {
  size_t n_features = 0;
  std::vector<std::string> feature_names;  // length n_features
  std::vector<double> x;                   // row-major, n_rows() * n_features
  std::vector<int8_t> y;                   // 0 / 1 / kUnlabeled
  std::vector<uint8_t> protected_attr;     // 1 = protected group

  size_t n_rows() const { return y.size(); }
  const double* row(size_t i) const { return x.data() + i * n_features; }
  size_t count_labeled() const;
  size_t count_unlabeled() const;
  void append_row(const Dataset& src, size_t i);
};

struct RawRecord {
  int age = 0;
  std::string workclass;
  std::string education;
  std::string marital_status;
  std::string occupation;
  std::string relationship;
  std::string race;
  std::string sex;
  double capital_gain = 0;
  double capital_loss = 0;
  double hours_per_week = 0;
  std::string native_country;
  int8_t label = 0;  // 1 = income above threshold
};

// Parses one census income file (comma-separated, 15 columns). Skips blank
// lines, '|' banner lines, and a header row. Drops any record holding the
// "?" missing marker in a retained column. Label accepts an optional
// trailing period.
std::vector<RawRecord> load_raw(const std::filesystem::path& file);

// Age buckets are left-closed: (-inf,18) [18,25) [25,30) ... [60,65) [65,inf).
int bucketize_age(int age);

// One-hot vocabularies plus standardization statistics, fit on the corpus
// passed to fit(). transform() rejects categories absent from the fit corpus.
class Encoder {
 public:
  void fit(const std::vector<RawRecord>& records);
  Dataset transform(const std::vector<RawRecord>& records) const;
  bool fitted() const { return !names_.empty(); }
  const std::vector<std::string>& feature_names() const { return names_; }

 private:
  // One vocabulary per categorical column, in encoding order.
  std::vector<std::vector<std::string>> vocabs_;
  double cont_mean_[3] = {0, 0, 0};
  double cont_std_[3] = {1, 1, 1};
  std::vector<std::string> names_;
};

// fit + transform over the same records.
Dataset encode(const std::vector<RawRecord>& records);

struct SplitSpec {
  double train_fraction = 0.7;
  uint64_t seed = 0;
};

// Seeded uniform partition; train gets floor(train_fraction * N) rows.
std::pair<Dataset, Dataset> split(const Dataset& dataset, const SplitSpec& spec);

// Keeps the ground-truth label on exactly n_labeled seeded-uniform rows and
// sets every other label to kUnlabeled. Features and protected tags are
// untouched.
Dataset mask_labels(const Dataset& train, size_t n_labeled, uint64_t seed);

// Columnar text format: a header row of feature names plus "label" and
// "protected"; then one comma-separated row per sample with 112 (or D)
// feature values, label in {0,1,u} and protected in {p,n}.
void write_dataset(const Dataset& d, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace ssfair
