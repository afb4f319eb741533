#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gfmm {

enum class FeatureKind { Numeric, Categorical };

/// Categorical code stored in a sample whose value is not in the declared domain.
inline constexpr int kUnseen = -2;

struct Column {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;
};

/// Column roles and categorical domains. Column order is the canonical
/// feature order: numeric features are indexed by their rank among numeric
/// columns and likewise for categorical ones.
struct FeatureSchema {
  std::vector<Column> columns;
  std::string class_column;
  std::map<std::string, std::vector<std::string>> categorical_domains;

  std::size_t numeric_count() const;
  std::size_t categorical_count() const;
  std::vector<std::string> numeric_names() const;
  std::vector<std::string> categorical_names() const;

  /// Domain of the j-th categorical feature (empty when not yet inferred).
  const std::vector<std::string>& domain(std::size_t categorical_index) const;

  /// Throws SchemaError when an invariant is violated.
  void validate() const;

  static FeatureSchema parse(const std::string& text);
  static FeatureSchema load(const std::string& path);
  std::string to_text() const;
};

struct MixedSample {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> categorical;  // index into the schema domain, or kUnseen
  std::optional<int> label;
};

struct Dataset {
  FeatureSchema schema;
  std::vector<MixedSample> samples;
  std::vector<std::string> class_names;

  std::size_t size() const { return samples.size(); }
  std::size_t n() const { return schema.numeric_count(); }
  std::size_t r() const { return schema.categorical_count(); }
  std::size_t class_count() const { return class_names.size(); }

  std::vector<int> labels() const;
  Dataset subset(const std::vector<std::size_t>& indices) const;
  /// Copy keeping only the numeric (or only the categorical) features.
  Dataset numeric_part() const;
  Dataset categorical_part() const;
};

enum class Phase { Train, Test };

/// Reads a CSV with a header row. When the schema carries no domain for a
/// categorical column, the domain is inferred from the file in first-appearance
/// order. In the Train phase a value outside a declared domain is an error; in
/// the Test phase it is stored as kUnseen. Numeric columns may be given as a
/// pair "<name>.lo" / "<name>.hi" for interval-valued samples.
Dataset load_csv(const std::string& path, const FeatureSchema& schema, Phase phase = Phase::Train);
Dataset parse_csv(const std::string& text, const FeatureSchema& schema, Phase phase = Phase::Train,
                  const std::string& origin = "<memory>");

class Normalizer {
 public:
  static Normalizer fit(const Dataset& train);
  Dataset transform(const Dataset& data) const;
  double transform_value(std::size_t feature, double value) const;
  double inverse_value(std::size_t feature, double value) const;

  const std::vector<double>& minimum() const { return min_; }
  const std::vector<double>& maximum() const { return max_; }

 private:
  std::vector<double> min_;
  std::vector<double> max_;
};

struct Split {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Repeated k-fold splitting. Each repeat reshuffles with a generator seeded
/// from (seed, repeat). Folds are stratified when every class has at least k
/// members.
std::vector<Split> kfold_splits(const std::vector<int>& labels, std::size_t k, std::size_t repeats,
                                std::uint64_t seed);
std::vector<Split> kfold_splits(const Dataset& data, std::size_t k, std::size_t repeats, std::uint64_t seed);

/// Stratified split into two halves whose sizes differ by at most one.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_halves(const std::vector<int>& labels,
                                                                                std::uint64_t seed);

enum class SyntheticVariant { One, Two };

struct SyntheticLayout {
  // Two Gaussian components per class with isotropic spread.
  std::vector<std::pair<double, double>> class0_means{{-0.3, 0.7}, {0.3, 0.7}};
  std::vector<std::pair<double, double>> class1_means{{-0.7, 0.3}, {0.4, 0.3}};
  double stddev = 0.17320508075688773;  // sqrt(0.03)
  std::size_t train_per_class = 125;
  std::size_t test_per_class = 500;
  // When false, rows stay grouped by class (all of class 0 first).
  bool shuffle = true;
};

std::pair<Dataset, Dataset> generate_synthetic(SyntheticVariant variant, std::uint64_t seed,
                                               const SyntheticLayout& layout = {});

}  // namespace gfmm
