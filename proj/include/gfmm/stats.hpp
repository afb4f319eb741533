#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gfmm/hyperbox.hpp"

namespace gfmm {

/// p x p counts; rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::size_t p = 0;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> unassigned;  // per true class: predictions outside the class set

  explicit ConfusionMatrix(std::size_t classes = 0)
      : p(classes), counts(classes * classes, 0), unassigned(classes, 0) {}
  void add(int actual, int predicted);
  std::size_t at(std::size_t actual, std::size_t predicted) const { return counts[actual * p + predicted]; }
  std::size_t total() const;
  double accuracy() const;

  static ConfusionMatrix from_labels(const std::vector<int>& actual, const std::vector<int>& predicted,
                                     std::size_t classes);
};

/// Class-balanced accuracy: mean over classes of cm[i][i] / max(row_i, col_i),
/// with a class that is empty in both directions contributing 0.
double cba(const ConfusionMatrix& cm);

/// N datasets x M methods rank matrix.
struct RankTable {
  std::size_t datasets = 0;
  std::size_t methods = 0;
  std::vector<double> ranks;  // row-major

  double at(std::size_t i, std::size_t j) const { return ranks[i * methods + j]; }
  std::vector<double> mean_ranks() const;
};

/// Ranks each row of a row-major N x M score table, best first, with mid-ranks
/// for ties.
RankTable rank_methods(const std::vector<double>& scores, std::size_t datasets, std::size_t methods,
                       bool higher_is_better = true);

struct TestResult {
  std::size_t datasets = 0;
  std::size_t methods = 0;
  double alpha = 0.05;
  double chi2_f = 0;
  double f_f = 0;
  double df1 = 0;
  double df2 = 0;
  double critical = 0;
  bool reject = false;
  double cd = 0;
  std::vector<double> mean_ranks;
};

/// Friedman test with the Iman-Davenport F correction. The null hypothesis is
/// rejected when F_F exceeds the critical value of F(M-1, (M-1)(N-1)).
TestResult friedman(const RankTable& ranks, double alpha = 0.05);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);
/// CDF of the F distribution with (d1, d2) degrees of freedom.
double f_cdf(double x, double d1, double d2);
/// Upper-tail critical value: the x with P(F <= x) = 1 - alpha.
double f_critical(double d1, double d2, double alpha);

/// Studentized range quantile divided by sqrt(2), for alpha in {0.05, 0.10}
/// and 2 <= M <= 30.
double nemenyi_q(std::size_t methods, double alpha);
double nemenyi_cd(std::size_t methods, std::size_t datasets, double alpha);

/// Maximal runs of methods (indices into `mean_ranks`, sorted by rank) whose
/// rank spread is below `cd`. Only runs with at least two members are returned.
std::vector<std::vector<std::size_t>> cd_groups(const std::vector<double>& mean_ranks, double cd);

std::string render_cd_svg(const std::vector<std::string>& names, const TestResult& result);
std::string render_cd_text(const std::vector<std::string>& names, const TestResult& result);
/// Writes <stem>.svg and <stem>.txt.
void emit_cd_diagram(const std::vector<std::string>& names, const TestResult& result, const std::string& stem);

struct SecondaryReport {
  std::size_t boxes = 0;
  std::size_t secondary = 0;
  std::size_t secondary_correct = 0;
};

/// Counts predictions decided by the secondary criterion and how many of
/// those were correct.
SecondaryReport secondary_report(std::size_t boxes, const std::vector<Prediction>& predictions,
                                 const std::vector<int>& truth);

}  // namespace gfmm
