#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gfmm/dataset.hpp"
#include "gfmm/hyperbox.hpp"

namespace gfmm {

/// Interval-valued training or test rows with values in [0, 1].
struct IntervalData {
  std::size_t rows = 0;
  std::size_t dims = 0;
  std::vector<double> lower;  // row-major rows x dims
  std::vector<double> upper;
  std::vector<int> labels;

  const double* lo(std::size_t i) const { return lower.data() + i * dims; }
  const double* hi(std::size_t i) const { return upper.data() + i * dims; }

  /// Crisp rows (lower == upper) from a row-major value table.
  static IntervalData from_points(std::size_t rows, std::size_t dims, std::vector<double> values,
                                  std::vector<int> labels);
  /// Numeric bounds of a normalized dataset.
  static IntervalData from_numeric(const Dataset& data);
};

enum class Algorithm { Onln, Iol, AggloSm, Agglo2 };
enum class SimilarityKind { LongestDistance, ShortestDistance, Midpoint };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);
std::string to_string(SimilarityKind k);
SimilarityKind parse_similarity(const std::string& name);

struct NumericLearnerConfig {
  Algorithm algorithm = Algorithm::Onln;
  double theta = 0.1;
  double gamma = 1.0;
  double sigma = 0.0;
  SimilarityKind similarity = SimilarityKind::LongestDistance;

  void validate() const;
};

/// Trained hyperbox classifier over numeric inputs.
class GfmmModel {
 public:
  GfmmModel() = default;
  GfmmModel(NumericLearnerConfig cfg, std::size_t dims, std::vector<Hyperbox> boxes);

  Prediction predict(const double* xl, const double* xu) const;
  std::vector<Prediction> predict_all(const IntervalData& data) const;

  const NumericLearnerConfig& config() const { return cfg_; }
  const std::vector<Hyperbox>& boxes() const { return boxes_; }
  std::size_t dims() const { return dims_; }
  const std::vector<double>& gamma() const { return gamma_; }

 private:
  NumericLearnerConfig cfg_;
  std::size_t dims_ = 0;
  std::vector<double> gamma_;
  std::vector<Hyperbox> boxes_;
};

/// Per-sample bookkeeping recorded by the online learner.
struct OnlineTrace {
  std::vector<std::size_t> absorbing_box;        // box index per training row
  std::vector<std::uint64_t> contractions_seen;  // box contraction count at absorption
  std::vector<std::uint64_t> box_contractions;   // final contraction count per box
};

GfmmModel train_onln(const IntervalData& train, const NumericLearnerConfig& cfg, OnlineTrace* trace = nullptr);
GfmmModel train_iol(const IntervalData& train, const NumericLearnerConfig& cfg);
GfmmModel train_agglo_sm(const IntervalData& train, const NumericLearnerConfig& cfg);
GfmmModel train_agglo2(const IntervalData& train, const NumericLearnerConfig& cfg);
GfmmModel train_numeric(const IntervalData& train, const NumericLearnerConfig& cfg);

/// Similarity of two boxes under the chosen measure.
///  longest:  min_j 1 - f(max(w_k - v_i, w_i - v_k))
///  shortest: min_j 1 - f(max(v_k - w_i, v_i - w_k))
///  midpoint: min_j 1 - f(|(v_k + w_k)/2 - (v_i + w_i)/2|)
double similarity(const Hyperbox& i, const Hyperbox& k, SimilarityKind kind, const std::vector<double>& gamma);

/// Number of different-class box pairs reported as overlapping by the
/// four-case test.
std::size_t count_interclass_overlaps(const std::vector<Hyperbox>& boxes);

}  // namespace gfmm
