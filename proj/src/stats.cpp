#include "gfmm/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "gfmm/errors.hpp"

namespace gfmm {

void ConfusionMatrix::add(int actual, int predicted) {
  if (actual < 0 || static_cast<std::size_t>(actual) >= p) throw DimensionMismatch("true class out of range");
  if (predicted < 0 || static_cast<std::size_t>(predicted) >= p) {
    unassigned[static_cast<std::size_t>(actual)] += 1;
    return;
  }
  counts[static_cast<std::size_t>(actual) * p + static_cast<std::size_t>(predicted)] += 1;
}

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0}) +
         std::accumulate(unassigned.begin(), unassigned.end(), std::size_t{0});
}

double ConfusionMatrix::accuracy() const {
  const auto t = total();
  if (t == 0) throw EmptyMatrix("accuracy of an empty confusion matrix");
  std::size_t d = 0;
  for (std::size_t i = 0; i < p; ++i) d += at(i, i);
  return static_cast<double>(d) / static_cast<double>(t);
}

ConfusionMatrix ConfusionMatrix::from_labels(const std::vector<int>& actual, const std::vector<int>& predicted,
                                             std::size_t classes) {
  if (actual.size() != predicted.size()) throw DimensionMismatch("label vectors differ in length");
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < actual.size(); ++i) cm.add(actual[i], predicted[i]);
  return cm;
}

double cba(const ConfusionMatrix& cm) {
  if (cm.p == 0 || cm.total() == 0) throw EmptyMatrix("class-balanced accuracy of an empty confusion matrix");
  double sum = 0;
  for (std::size_t i = 0; i < cm.p; ++i) {
    std::size_t row = cm.unassigned[i], col = 0;
    for (std::size_t k = 0; k < cm.p; ++k) {
      row += cm.at(i, k);
      col += cm.at(k, i);
    }
    const auto denom = std::max(row, col);
    if (denom > 0) sum += static_cast<double>(cm.at(i, i)) / static_cast<double>(denom);
  }
  return sum / static_cast<double>(cm.p);
}

std::vector<double> RankTable::mean_ranks() const {
  std::vector<double> out(methods, 0.0);
  for (std::size_t i = 0; i < datasets; ++i)
    for (std::size_t j = 0; j < methods; ++j) out[j] += at(i, j);
  for (auto& v : out) v /= static_cast<double>(datasets);
  return out;
}

RankTable rank_methods(const std::vector<double>& scores, std::size_t datasets, std::size_t methods,
                       bool higher_is_better) {
  if (scores.size() != datasets * methods) throw DimensionMismatch("score table size does not match N x M");
  RankTable t{datasets, methods, std::vector<double>(scores.size())};
  std::vector<std::size_t> order(methods);
  for (std::size_t i = 0; i < datasets; ++i) {
    const double* row = scores.data() + i * methods;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return higher_is_better ? row[a] > row[b] : row[a] < row[b];
    });
    for (std::size_t pos = 0; pos < methods;) {
      std::size_t end = pos + 1;
      while (end < methods && row[order[end]] == row[order[pos]]) ++end;
      const double mid = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
      for (std::size_t q = pos; q < end; ++q) t.ranks[i * methods + order[q]] = mid;
      pos = end;
    }
  }
  return t;
}

TestResult friedman(const RankTable& ranks, double alpha) {
  if (ranks.datasets < 2 || ranks.methods < 2) throw DegenerateRanks("Friedman test needs N >= 2 and M >= 2");
  const double n = static_cast<double>(ranks.datasets);
  const double m = static_cast<double>(ranks.methods);
  TestResult r;
  r.datasets = ranks.datasets;
  r.methods = ranks.methods;
  r.alpha = alpha;
  r.mean_ranks = ranks.mean_ranks();
  double sq = 0;
  for (double rj : r.mean_ranks) sq += rj * rj;
  r.chi2_f = 12.0 * n / (m * (m + 1.0)) * (sq - m * (m + 1.0) * (m + 1.0) / 4.0);
  const double denom = n * (m - 1.0) - r.chi2_f;
  if (!(denom > 1e-12)) throw DegenerateRanks("Friedman statistic at its maximum; F_F is undefined");
  r.f_f = (n - 1.0) * r.chi2_f / denom;
  r.df1 = m - 1.0;
  r.df2 = (m - 1.0) * (n - 1.0);
  r.critical = f_critical(r.df1, r.df2, alpha);
  r.reject = r.f_f > r.critical;
  r.cd = nemenyi_cd(ranks.methods, ranks.datasets, alpha);
  return r;
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw ConfigError("incomplete beta needs positive shape parameters");
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(lbt);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double f_cdf(double x, double d1, double d2) {
  if (x <= 0) return 0.0;
  return incomplete_beta(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2));
}

double f_critical(double d1, double d2, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw UnsupportedAlpha("alpha must lie in (0, 1)");
  const double target = 1.0 - alpha;
  // Bisection on the beta variable u = d1 x / (d1 x + d2), which lives in (0, 1).
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (incomplete_beta(d1 / 2.0, d2 / 2.0, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double u = 0.5 * (lo + hi);
  return d2 * u / (d1 * (1.0 - u));
}

namespace {

// Studentized range quantiles at infinite degrees of freedom divided by
// sqrt(2), for k = 2..30 groups.
constexpr std::array<double, 29> kQ05 = {
    1.959964, 2.343701, 2.569032, 2.727774, 2.849705, 2.948320, 3.030878, 3.101730, 3.163684, 3.218654,
    3.268004, 3.312739, 3.353618, 3.391230, 3.426041, 3.458425, 3.488685, 3.517073, 3.543799, 3.569040,
    3.592946, 3.615646, 3.637252, 3.657861, 3.677556, 3.696413, 3.714498, 3.731869, 3.748578};
constexpr std::array<double, 29> kQ10 = {
    1.644854, 2.052293, 2.291341, 2.459516, 2.588521, 2.692732, 2.779884, 2.854606, 2.919889, 2.977768,
    3.029694, 3.076733, 3.119693, 3.159199, 3.195743, 3.229723, 3.261461, 3.291224, 3.319233, 3.345676,
    3.370712, 3.394477, 3.417089, 3.438651, 3.459253, 3.478971, 3.497878, 3.516033, 3.533492};

}  // namespace

double nemenyi_q(std::size_t methods, double alpha) {
  if (methods < 2 || methods > 30) throw UnsupportedAlpha(fmt::format("no Nemenyi quantile for M = {}", methods));
  if (std::abs(alpha - 0.05) < 1e-12) return kQ05[methods - 2];
  if (std::abs(alpha - 0.10) < 1e-12) return kQ10[methods - 2];
  throw UnsupportedAlpha(fmt::format("no Nemenyi quantile for alpha = {}", alpha));
}

double nemenyi_cd(std::size_t methods, std::size_t datasets, double alpha) {
  if (datasets == 0) throw DegenerateRanks("critical difference needs at least one dataset");
  const double m = static_cast<double>(methods);
  return nemenyi_q(methods, alpha) * std::sqrt(m * (m + 1.0) / (6.0 * static_cast<double>(datasets)));
}

std::vector<std::vector<std::size_t>> cd_groups(const std::vector<double>& mean_ranks, double cd) {
  std::vector<std::size_t> order(mean_ranks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return mean_ranks[a] < mean_ranks[b]; });
  std::vector<std::vector<std::size_t>> groups;
  std::size_t last_end = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::size_t end = i;
    while (end + 1 < order.size() && mean_ranks[order[end + 1]] - mean_ranks[order[i]] < cd) ++end;
    if (end > i && end + 1 > last_end) {
      groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                          order.begin() + static_cast<std::ptrdiff_t>(end + 1));
      last_end = end + 1;
    }
  }
  return groups;
}

std::string render_cd_svg(const std::vector<std::string>& names, const TestResult& result) {
  const std::size_t m = result.mean_ranks.size();
  if (names.size() != m) throw DimensionMismatch("one name per method is required");
  const double left = 60, right = 540, axis_y = 60;
  const double lo = 1.0, hi = std::max<double>(2.0, static_cast<double>(m));
  auto xpos = [&](double r) { return left + (r - lo) / (hi - lo) * (right - left); };
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return result.mean_ranks[a] < result.mean_ranks[b]; });
  const auto groups = cd_groups(result.mean_ranks, result.cd);
  const double height = axis_y + 40 + 18.0 * static_cast<double>(m) + 14.0 * static_cast<double>(groups.size());

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"{:.0f}\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n",
      height);
  s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", left, axis_y,
                   right, axis_y);
  for (std::size_t r = 1; r <= static_cast<std::size_t>(hi); ++r) {
    const double x = xpos(static_cast<double>(r));
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", x,
                     axis_y - 5, x, axis_y);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", x, axis_y - 8, r);
  }
  s += fmt::format(
      "<line x1=\"{:.2f}\" y1=\"20\" x2=\"{:.2f}\" y2=\"20\" stroke=\"black\" stroke-width=\"2\"/>\n"
      "<text x=\"{:.2f}\" y=\"15\" text-anchor=\"middle\">CD = {:.4f}</text>\n",
      xpos(lo), xpos(std::min(hi, lo + result.cd)), (xpos(lo) + xpos(std::min(hi, lo + result.cd))) / 2.0, result.cd);
  double y = axis_y + 20;
  for (const auto& g : groups) {
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\" "
                     "stroke-width=\"3\"/>\n",
                     xpos(result.mean_ranks[g.front()]) - 3, y, xpos(result.mean_ranks[g.back()]) + 3, y);
    y += 14;
  }
  y += 10;
  for (auto j : order) {
    const double x = xpos(result.mean_ranks[j]);
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\"/>\n", x, axis_y);
    s += fmt::format("<polyline points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" fill=\"none\" stroke=\"gray\"/>\n",
                     x, axis_y, x, y, right + 5, y);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{} ({:.4f})</text>\n", right + 8, y + 4, names[j],
                     result.mean_ranks[j]);
    y += 18;
  }
  s += "</svg>\n";
  return s;
}

std::string render_cd_text(const std::vector<std::string>& names, const TestResult& result) {
  const std::size_t m = result.mean_ranks.size();
  if (names.size() != m) throw DimensionMismatch("one name per method is required");
  std::string s = fmt::format("N = {}, M = {}, alpha = {}\nchi2_F = {:.6f}, F_F = {:.6f}, F({:g}, {:g}) critical = "
                              "{:.6f}, reject = {}\nCD = {:.6f}\n\nmean ranks:\n",
                              result.datasets, result.methods, result.alpha, result.chi2_f, result.f_f, result.df1,
                              result.df2, result.critical, result.reject ? "yes" : "no", result.cd);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return result.mean_ranks[a] < result.mean_ranks[b]; });
  for (auto j : order) s += fmt::format("  {:>8.4f}  {}\n", result.mean_ranks[j], names[j]);
  s += "\nnot significantly different:\n";
  for (const auto& g : cd_groups(result.mean_ranks, result.cd)) {
    s += " ";
    for (auto j : g) s += " [" + names[j] + "]";
    s += "\n";
  }
  return s;
}

void emit_cd_diagram(const std::vector<std::string>& names, const TestResult& result, const std::string& stem) {
  for (const auto& [ext, body] : {std::pair{std::string(".svg"), render_cd_svg(names, result)},
                                  std::pair{std::string(".txt"), render_cd_text(names, result)}}) {
    std::ofstream out(stem + ext, std::ios::binary);
    if (!out) throw IoError("cannot write " + stem + ext);
    out << body;
    if (!out) throw IoError("failed writing " + stem + ext);
  }
}

SecondaryReport secondary_report(std::size_t boxes, const std::vector<Prediction>& predictions,
                                 const std::vector<int>& truth) {
  if (predictions.size() != truth.size()) throw DimensionMismatch("predictions and labels differ in length");
  SecondaryReport r;
  r.boxes = boxes;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!predictions[i].secondary) continue;
    r.secondary += 1;
    if (predictions[i].label == truth[i]) r.secondary_correct += 1;
  }
  return r;
}

}  // namespace gfmm
