#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gfmm/dataset.hpp"
#include "gfmm/encoders.hpp"
#include "gfmm/learners.hpp"
#include "gfmm/mixed.hpp"
#include "gfmm/stats.hpp"

namespace gfmm {

/// Flat `key = value` experiment description. List values are comma
/// separated; `#` starts a comment. See README.md for the key reference.
struct ExperimentConfig {
  std::vector<std::string> datasets;
  std::string data_dir = "data";
  std::string reference = "data/reference/published_results.csv";

  // Encoder grid: every algorithm is paired with every encoder name
  // ("numeric-only" drops the categorical features).
  std::vector<Algorithm> algorithms;
  std::vector<std::string> encoders;
  std::vector<double> thetas{0.1, 0.7, 1.0};

  // Stacking grid: every scheme ("A" or "B") with every level-1 algorithm.
  std::vector<std::string> hybrid_schemes;
  std::vector<Algorithm> hybrid_algorithms;
  std::size_t tree_max_depth = 10;
  std::uint64_t hybrid_seed = 0;

  // Mixed-attribute learners.
  std::vector<double> m1_etas;
  std::vector<double> m2_betas;

  std::size_t folds = 4;
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  double gamma = 1.0;
  double sigma = 0.0;
  SimilarityKind similarity = SimilarityKind::LongestDistance;
  EncoderParams encoder_params;
  double alpha = 0.05;
  std::string out_dir = "results";
  std::size_t jobs = 1;

  void validate() const;
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  /// Experiment settings as config text. The execution settings `out` and
  /// `jobs` are left out so that reports do not depend on them.
  std::string to_text() const;
};

enum class CellKind { Encoded, Hybrid, Mixed };

/// One point of the experiment grid on one dataset. `family` and `method`
/// follow the naming of the published-results table.
struct Cell {
  std::string dataset;
  std::string family;
  std::string method;
  double theta = 0.1;
  CellKind kind = CellKind::Encoded;
  Algorithm algorithm = Algorithm::Onln;
  std::optional<EncoderKind> encoder;  // empty: numeric-only
  char scheme = 'A';
  MixedAlgorithm mixed = MixedAlgorithm::M1;
  double parameter = 0;  // eta or beta fraction

  std::string label() const { return family + "/" + method; }
};

struct FoldResult {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  double cba = 0;
  std::size_t boxes = 0;
  std::size_t secondary = 0;
  std::size_t secondary_correct = 0;
};

struct CellResult {
  Cell cell;
  bool skipped = false;
  std::string skip_reason;
  std::vector<FoldResult> folds;
  double cba_mean = 0;
  double cba_sd = 0;
  double boxes_mean = 0;
  double secondary_mean = 0;
};

/// Friedman/Nemenyi analysis of one family at one theta.
struct RankSummary {
  std::string family;
  double theta = 0;
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  RankTable ranks;
  std::optional<TestResult> test;
  std::string note;
};

struct EvaluationReport {
  ExperimentConfig config;
  std::vector<CellResult> cells;
  std::vector<RankSummary> rankings;

  const CellResult* find(const std::string& dataset, const std::string& family, const std::string& method,
                         double theta) const;
};

/// Loads <dir>/<name>.csv with <dir>/<name>.schema. Throws MissingDataset.
Dataset load_named_dataset(const std::string& dir, const std::string& name);

/// Grid cells for one dataset, in deterministic order. Cells the dataset
/// cannot support (numeric-only without numeric features, stacking without
/// both feature kinds) are still listed and reported as skipped.
std::vector<Cell> expand_grid(const ExperimentConfig& cfg, const std::string& dataset);

/// Reason a cell cannot run on `data`, or empty when it can.
std::string skip_reason(const Cell& cell, const Dataset& data);

/// Model inputs of one fold. All fitted state (normalizer and encoder) comes
/// from the training rows only.
struct PreparedFold {
  IntervalData train;
  IntervalData test;
  Dataset train_rows;  // normalized
  Dataset test_rows;   // normalized
};
PreparedFold prepare_fold(const Cell& cell, const Dataset& data, const Split& split, const ExperimentConfig& cfg);

FoldResult evaluate_fold(const Cell& cell, const Dataset& data, const Split& split, const ExperimentConfig& cfg);

/// Runs every cell on every fold with cfg.jobs worker threads. The result is
/// independent of the worker count.
EvaluationReport run_experiment(const ExperimentConfig& cfg);

/// Family/theta rankings with Friedman and Nemenyi statistics. Encoder-grid
/// families are also ranked jointly under the family name "encoded".
std::vector<RankSummary> compute_rankings(const std::vector<CellResult>& cells, double alpha);

/// folds.csv, summary.csv, ranks.csv, summary.json and CD diagrams.
void write_report(const EvaluationReport& report, const std::string& dir);

struct ReferenceValue {
  std::string measure;
  std::string family;
  std::string dataset;
  std::string theta;
  std::string method;
  double value = 0;
};
std::vector<ReferenceValue> load_reference(const std::string& path);

struct ComparisonRow {
  ReferenceValue reference;
  double reproduced = 0;
  double abs_delta = 0;
};
std::vector<ComparisonRow> compare_with_reference(const EvaluationReport& report,
                                                  const std::vector<ReferenceValue>& reference);
void write_comparison(const std::vector<ComparisonRow>& rows, const std::string& path);

struct ClaimResult {
  std::string name;
  bool evaluated = false;
  bool pass = false;
  std::string detail;
};
/// Ordering claims checked by `reproduce`, one result per claim. README.md
/// lists the claims and their pass conditions.
std::vector<ClaimResult> evaluate_claims(const EvaluationReport& report);

/// Theta formatted as in the published-results table ("0.1", "1").
std::string format_theta(double theta);

struct SyntheticRow {
  std::string algorithm;
  std::string encoder;
  double cba = 0;
  SecondaryReport secondary;
};
/// Trains every algorithm/encoder pair once on the synthetic training set and
/// reports CBA and secondary-criterion counts on the synthetic test set.
std::vector<SyntheticRow> run_synthetic(SyntheticVariant variant, std::uint64_t seed, double theta,
                                        const std::vector<Algorithm>& algorithms,
                                        const std::vector<EncoderKind>& encoders,
                                        const SyntheticLayout& layout = {});

/// Encoded train-phase and test-phase values of every training value of one
/// categorical feature, as CSV text.
std::string encode_inspect(const Dataset& data, EncoderKind kind, std::size_t feature,
                           const EncoderParams& params = {});

}  // namespace gfmm
