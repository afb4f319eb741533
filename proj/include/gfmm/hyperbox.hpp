#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace gfmm {

/// Unset categorical bound of a bound-pair hyperbox. Its distance to every
/// value is zero.
inline constexpr int kUnsetBound = -1;

struct BoundPair {
  std::vector<int> e;
  std::vector<int> f;
  bool operator==(const BoundPair&) const = default;
};

struct BitStrings {
  std::vector<boost::dynamic_bitset<>> s;
  bool operator==(const BitStrings& o) const { return s == o.s; }
};

using CategoricalPayload = std::variant<std::monostate, BoundPair, BitStrings>;

struct Hyperbox {
  std::vector<double> v;  // min point
  std::vector<double> w;  // max point
  CategoricalPayload cat;
  int label = 0;
  std::uint64_t cardinality = 0;
  std::uint64_t creation = 0;

  std::size_t n() const { return v.size(); }
  std::vector<double> center() const;
  bool operator==(const Hyperbox&) const = default;
};

/// Piecewise-linear ramp clamped to [0, 1].
double ramp(double lambda, double gamma);

/// Membership of the interval input [xl, xu] in the numeric part of a box.
/// Returns 1 for a zero-dimensional box.
double membership(const std::vector<double>& v, const std::vector<double>& w, const double* xl, const double* xu,
                  const std::vector<double>& gamma);
double membership(const Hyperbox& box, const std::vector<double>& xl, const std::vector<double>& xu,
                  const std::vector<double>& gamma);

/// Gamma vector of length n filled with `value`.
std::vector<double> uniform_gamma(std::size_t n, double value = 1.0);

struct Overlap {
  std::size_t dimension = 0;
  int test_case = 0;  // 1..4
};

/// Four-case overlap test between box i and box k. Returns nullopt when at
/// least one dimension satisfies none of the cases.
std::optional<Overlap> overlap_test(const std::vector<double>& vi, const std::vector<double>& wi,
                                    const std::vector<double>& vk, const std::vector<double>& wk);
std::optional<Overlap> overlap_test(const Hyperbox& i, const Hyperbox& k);

/// Which of the four cases holds on a single dimension (0 if none).
int overlap_case(double vi, double wi, double vk, double wk);

/// Resolves a detected overlap on the reported dimension only.
void contract(Hyperbox& i, Hyperbox& k, const Overlap& overlap);
void contract(std::vector<double>& vi, std::vector<double>& wi, std::vector<double>& vk, std::vector<double>& wk,
              const Overlap& overlap);

/// Outcome of classifying one sample.
struct Prediction {
  int label = -1;
  bool secondary = false;  // winners spanned more than one class
  double membership = 0;
  std::size_t winners = 0;
};

/// Winner selection with the L1 distance between centres as secondary rule.
/// `memberships` are aligned with `boxes`. `center` is the input centre; when
/// it is empty (no numeric features) the oldest winner decides.
Prediction resolve_manhattan(const std::vector<Hyperbox>& boxes, const std::vector<double>& memberships,
                             const std::vector<double>& center);

/// Winner selection with the cardinality-weighted class probability as the
/// secondary rule.
Prediction resolve_cardinality(const std::vector<Hyperbox>& boxes, const std::vector<double>& memberships);

Prediction predict_manhattan(const std::vector<Hyperbox>& boxes, const std::vector<double>& xl,
                             const std::vector<double>& xu, const std::vector<double>& gamma);
Prediction predict_cardinality(const std::vector<Hyperbox>& boxes, const std::vector<double>& xl,
                               const std::vector<double>& xu, const std::vector<double>& gamma);

}  // namespace gfmm
