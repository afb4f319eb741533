#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gfmm/dataset.hpp"

namespace gfmm {

enum class EncoderKind { Label, OneHot, Sum, Helmert, Target, JamesStein, Loo, CatBoost };

std::string to_string(EncoderKind kind);
EncoderKind parse_encoder_kind(const std::string& name);
const std::vector<EncoderKind>& all_encoder_kinds();

struct EncoderParams {
  double target_m = 1.0;    // half-weight sample count of the target smoother
  double target_z = 1.0;    // smoothing slope of the target smoother
  double catboost_z = 1.0;  // prior weight of the ordered target statistic
};

/// Row-major numeric table produced by an encoder.
struct EncodedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  /// (source categorical feature, component index) for every column.
  std::vector<std::pair<std::size_t, std::size_t>> provenance;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

/// Encoder state learned from training rows. Transforms are const and the
/// object is safe to share across threads.
class FittedEncoder {
 public:
  static FittedEncoder fit(EncoderKind kind, const Dataset& train, const EncoderParams& params = {});

  /// Encoded output rescaled into [0, 1] with the training minimum and maximum
  /// of every column; test values outside the training range are clipped.
  EncodedMatrix transform(const Dataset& data, Phase phase) const;
  /// Encoded output before rescaling.
  EncodedMatrix transform_raw(const Dataset& data, Phase phase) const;

  /// Raw components emitted for a value not seen in training.
  std::vector<double> unseen_components(std::size_t feature) const;

  EncoderKind kind() const { return kind_; }
  std::size_t output_arity() const { return provenance_.size(); }
  /// Training values of a feature in first-appearance order (schema codes).
  const std::vector<int>& training_values(std::size_t feature) const { return features_[feature].values; }
  const std::vector<double>& column_min() const { return col_min_; }
  const std::vector<double>& column_max() const { return col_max_; }

 private:
  struct FeatureState {
    std::vector<int> values;          // schema codes, first-appearance order
    std::vector<int> position;        // schema code -> index in `values`, -1 if absent
    std::vector<double> count;        // N_k
    std::vector<std::vector<double>> class_count;  // N_ck
    std::vector<double> target_sum;   // sum of integer class codes per value
    std::size_t width = 0;            // output columns of this feature
  };

  int position_of(std::size_t feature, int code) const;
  void encode_static(std::size_t feature, int pos, double* out) const;

  EncoderKind kind_ = EncoderKind::Label;
  EncoderParams params_;
  std::size_t classes_ = 0;
  double total_ = 0;
  std::vector<double> class_total_;  // N_c over training rows
  double target_mean_ = 0;           // mean integer class code
  std::vector<FeatureState> features_;
  std::vector<std::pair<std::size_t, std::size_t>> provenance_;
  std::vector<double> col_min_;
  std::vector<double> col_max_;
};

/// Smoothing weight of the target encoder: 1 / (1 + exp(-(n - m) / z)).
double target_lambda(double n, double m, double z);

}  // namespace gfmm
