#pragma once

#include <cstddef>
#include <vector>

#include "gfmm/dataset.hpp"
#include "gfmm/hyperbox.hpp"
#include "gfmm/learners.hpp"

namespace gfmm {

/// Class-conditional distances between the training values of every
/// categorical feature. Values are indexed by schema code.
class CategoricalDistanceTable {
 public:
  static CategoricalDistanceTable fit(const Dataset& train);

  /// Raw distance d(a, b) between two schema codes seen in training.
  double distance(std::size_t feature, int a, int b) const;
  /// Normalized distance h(a, b) in [0, 1]. An unset bound is at distance 0
  /// from everything; a value not seen in training is at distance 1 from any
  /// other value.
  double h(std::size_t feature, int a, int b) const;
  /// Estimated P(class | feature = a).
  const std::vector<double>& conditional(std::size_t feature, int a) const;

  bool seen(std::size_t feature, int code) const;
  /// Schema codes observed in training, in ascending code order.
  const std::vector<int>& values(std::size_t feature) const { return features_[feature].values; }
  std::size_t features() const { return features_.size(); }

 private:
  struct Feature {
    std::vector<int> values;
    std::vector<int> slot;  // schema code -> row of the matrices, -1 if unseen
    std::vector<std::vector<double>> prob;  // slot -> class distribution
    std::vector<double> d;                  // slot-major square matrix
    double max_d = 0;
  };
  int slot(std::size_t feature, int code) const;
  std::vector<Feature> features_;
};

struct M1Config {
  double theta = 0.1;
  double eta = 0.1;
  double gamma = 1.0;
  void validate() const;
};

struct M2Config {
  double theta = 0.1;
  double beta_fraction = 0.25;
  double gamma = 1.0;
  void validate() const;
  /// Integer threshold for r categorical features.
  std::size_t beta(std::size_t r) const;
};

enum class MixedAlgorithm { M1, M2 };

/// Trained mixed-attribute classifier. Inputs are datasets with normalized
/// numeric bounds and schema-coded categorical values.
class MixedModel {
 public:
  MixedModel() = default;
  MixedModel(MixedAlgorithm algo, double gamma, std::size_t n, std::size_t r, std::vector<Hyperbox> boxes,
             CategoricalDistanceTable table, std::vector<std::size_t> domain_sizes);

  double membership(const Hyperbox& box, const MixedSample& x) const;
  Prediction predict(const MixedSample& x) const;
  std::vector<Prediction> predict_all(const Dataset& data) const;

  MixedAlgorithm algorithm() const { return algo_; }
  const std::vector<Hyperbox>& boxes() const { return boxes_; }
  const CategoricalDistanceTable& table() const { return table_; }
  std::size_t n() const { return n_; }
  std::size_t r() const { return r_; }

 private:
  MixedAlgorithm algo_ = MixedAlgorithm::M1;
  double gamma_value_ = 1.0;
  std::vector<double> gamma_;
  std::size_t n_ = 0;
  std::size_t r_ = 0;
  std::vector<Hyperbox> boxes_;
  CategoricalDistanceTable table_;
  std::vector<std::size_t> domain_sizes_;
};

/// Membership of x in a bound-pair box.
double membership_m1(const Hyperbox& box, const MixedSample& x, const CategoricalDistanceTable& table,
                     const std::vector<double>& gamma);
/// Membership of x in a bit-string box. Categorical values of x are schema
/// codes; code c corresponds to bit c.
double membership_m2(const Hyperbox& box, const MixedSample& x, const std::vector<double>& gamma);
/// Number of categorical dimensions whose bit string shares a bit with x.
std::size_t matched_dims_m2(const Hyperbox& box, const MixedSample& x);

/// True when dimension `dim` of two bound-pair boxes shares a set bound value.
bool categorical_overlap(const BoundPair& a, const BoundPair& b, std::size_t dim);

MixedModel train_m1(const Dataset& train, const M1Config& cfg);
MixedModel train_m2(const Dataset& train, const M2Config& cfg);

}  // namespace gfmm
