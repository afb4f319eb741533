#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "gfmm/errors.hpp"
#include "gfmm/mixed.hpp"

namespace gfmm {

CategoricalDistanceTable CategoricalDistanceTable::fit(const Dataset& train) {
  CategoricalDistanceTable t;
  const std::size_t r = train.r();
  const std::size_t p = std::max<std::size_t>(train.class_count(), 1);
  t.features_.resize(r);
  for (std::size_t j = 0; j < r; ++j) {
    auto& f = t.features_[j];
    std::size_t domain = train.schema.domain(j).size();
    for (const auto& s : train.samples)
      domain = std::max(domain, static_cast<std::size_t>(std::max(s.categorical[j], 0)) + 1);
    std::vector<std::vector<double>> counts(domain, std::vector<double>(p, 0.0));
    std::vector<double> totals(domain, 0.0);
    for (const auto& s : train.samples) {
      const int a = s.categorical[j];
      if (a < 0) continue;
      counts[static_cast<std::size_t>(a)][static_cast<std::size_t>(s.label.value_or(0))] += 1;
      totals[static_cast<std::size_t>(a)] += 1;
    }
    f.slot.assign(domain, -1);
    for (std::size_t a = 0; a < domain; ++a) {
      if (totals[a] == 0) continue;
      f.slot[a] = static_cast<int>(f.values.size());
      f.values.push_back(static_cast<int>(a));
      std::vector<double> prob(p);
      for (std::size_t c = 0; c < p; ++c) prob[c] = counts[a][c] / totals[a];
      f.prob.push_back(std::move(prob));
    }
    const std::size_t m = f.values.size();
    f.d.assign(m * m, 0.0);
    for (std::size_t x = 0; x < m; ++x) {
      for (std::size_t y = x + 1; y < m; ++y) {
        double acc = 0;
        for (std::size_t c = 0; c < p; ++c) {
          const double diff = f.prob[x][c] - f.prob[y][c];
          acc += diff * diff;
        }
        const double d = std::sqrt(acc);
        f.d[x * m + y] = f.d[y * m + x] = d;
        f.max_d = std::max(f.max_d, d);
      }
    }
  }
  return t;
}

int CategoricalDistanceTable::slot(std::size_t feature, int code) const {
  const auto& f = features_[feature];
  if (code < 0 || static_cast<std::size_t>(code) >= f.slot.size()) return -1;
  return f.slot[static_cast<std::size_t>(code)];
}

bool CategoricalDistanceTable::seen(std::size_t feature, int code) const { return slot(feature, code) >= 0; }

double CategoricalDistanceTable::distance(std::size_t feature, int a, int b) const {
  const int sa = slot(feature, a), sb = slot(feature, b);
  if (sa < 0 || sb < 0) throw UnknownCategory("distance requested for a value not seen in training");
  const auto m = features_[feature].values.size();
  return features_[feature].d[static_cast<std::size_t>(sa) * m + static_cast<std::size_t>(sb)];
}

double CategoricalDistanceTable::h(std::size_t feature, int a, int b) const {
  if (a == kUnsetBound || b == kUnsetBound) return 0.0;
  if (a == b) return 0.0;
  const int sa = slot(feature, a), sb = slot(feature, b);
  if (sa < 0 || sb < 0) return 1.0;
  const auto& f = features_[feature];
  if (!(f.max_d > 0)) return 0.0;
  return f.d[static_cast<std::size_t>(sa) * f.values.size() + static_cast<std::size_t>(sb)] / f.max_d;
}

const std::vector<double>& CategoricalDistanceTable::conditional(std::size_t feature, int a) const {
  const int sa = slot(feature, a);
  if (sa < 0) throw UnknownCategory("conditional requested for a value not seen in training");
  return features_[feature].prob[static_cast<std::size_t>(sa)];
}

void M1Config::validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in (0, 1]");
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
}

void M2Config::validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in (0, 1]");
  if (!(beta_fraction >= 0.0 && beta_fraction <= 1.0)) throw ConfigError("beta fraction must lie in [0, 1]");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
}

std::size_t M2Config::beta(std::size_t r) const {
  auto b = static_cast<std::size_t>(std::floor(beta_fraction * static_cast<double>(r)));
  if (beta_fraction > 0 && b < 1) b = 1;
  return std::min(b, r);
}

bool categorical_overlap(const BoundPair& a, const BoundPair& b, std::size_t j) {
  auto eq = [](int x, int y) { return x != kUnsetBound && x == y; };
  return eq(a.e[j], b.e[j]) || eq(a.e[j], b.f[j]) || eq(a.f[j], b.e[j]) || eq(a.f[j], b.f[j]);
}

double membership_m1(const Hyperbox& box, const MixedSample& x, const CategoricalDistanceTable& table,
                     const std::vector<double>& gamma) {
  double b = membership(box.v, box.w, x.lower.data(), x.upper.data(), gamma);
  const auto& bp = std::get<BoundPair>(box.cat);
  for (std::size_t j = 0; j < bp.e.size() && b > 0; ++j) {
    const int a = x.categorical[j];
    if (a >= 0 && (a == bp.e[j] || a == bp.f[j])) continue;
    b = std::min(b, std::min(1.0 - table.h(j, a, bp.e[j]), 1.0 - table.h(j, a, bp.f[j])));
  }
  return b;
}

std::size_t matched_dims_m2(const Hyperbox& box, const MixedSample& x) {
  const auto& bs = std::get<BitStrings>(box.cat);
  std::size_t matched = 0;
  for (std::size_t j = 0; j < bs.s.size(); ++j) {
    const int a = x.categorical[j];
    if (a >= 0 && static_cast<std::size_t>(a) < bs.s[j].size() && bs.s[j].test(static_cast<std::size_t>(a))) ++matched;
  }
  return matched;
}

double membership_m2(const Hyperbox& box, const MixedSample& x, const std::vector<double>& gamma) {
  const std::size_t r = x.categorical.size();
  const bool has_num = box.n() > 0;
  const double num = membership(box.v, box.w, x.lower.data(), x.upper.data(), gamma);
  if (r == 0) return num;
  const double cat = static_cast<double>(matched_dims_m2(box, x)) / static_cast<double>(r);
  if (!has_num) return cat;
  return 0.5 * (num + cat);
}

MixedModel::MixedModel(MixedAlgorithm algo, double gamma, std::size_t n, std::size_t r, std::vector<Hyperbox> boxes,
                       CategoricalDistanceTable table, std::vector<std::size_t> domain_sizes)
    : algo_(algo),
      gamma_value_(gamma),
      gamma_(uniform_gamma(n, gamma)),
      n_(n),
      r_(r),
      boxes_(std::move(boxes)),
      table_(std::move(table)),
      domain_sizes_(std::move(domain_sizes)) {}

double MixedModel::membership(const Hyperbox& box, const MixedSample& x) const {
  return algo_ == MixedAlgorithm::M1 ? membership_m1(box, x, table_, gamma_) : membership_m2(box, x, gamma_);
}

Prediction MixedModel::predict(const MixedSample& x) const {
  if (x.lower.size() != n_ || x.categorical.size() != r_) throw DimensionMismatch("sample arity does not match model");
  std::vector<double> mem(boxes_.size());
  for (std::size_t i = 0; i < boxes_.size(); ++i) mem[i] = membership(boxes_[i], x);
  std::vector<double> center(n_);
  for (std::size_t j = 0; j < n_; ++j) center[j] = (x.lower[j] + x.upper[j]) / 2.0;
  return resolve_manhattan(boxes_, mem, center);
}

std::vector<Prediction> MixedModel::predict_all(const Dataset& data) const {
  std::vector<Prediction> out;
  out.reserve(data.size());
  for (const auto& s : data.samples) out.push_back(predict(s));
  return out;
}

namespace {

std::vector<std::pair<double, std::size_t>> rank_by(const std::vector<Hyperbox>& boxes, int label,
                                                   const std::function<double(const Hyperbox&)>& mem) {
  std::vector<std::pair<double, std::size_t>> out;
  for (std::size_t i = 0; i < boxes.size(); ++i)
    if (boxes[i].label == label) out.emplace_back(mem(boxes[i]), i);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  return out;
}

bool numeric_fits(const Hyperbox& b, const MixedSample& x, double theta) {
  for (std::size_t j = 0; j < b.v.size(); ++j)
    if (std::max(b.w[j], x.upper[j]) - std::min(b.v[j], x.lower[j]) > theta) return false;
  return true;
}

void expand_numeric(Hyperbox& b, const MixedSample& x) {
  for (std::size_t j = 0; j < b.v.size(); ++j) {
    b.v[j] = std::min(b.v[j], x.lower[j]);
    b.w[j] = std::max(b.w[j], x.upper[j]);
  }
}

bool m1_gate(const BoundPair& bp, const MixedSample& x, const CategoricalDistanceTable& t, double eta) {
  for (std::size_t j = 0; j < bp.e.size(); ++j) {
    const int a = x.categorical[j], e = bp.e[j], f = bp.f[j];
    if (e == kUnsetBound && f == kUnsetBound) continue;
    if (a == e || a == f) continue;
    if (f == kUnsetBound) {
      if (t.h(j, e, a) > eta) return false;
      continue;
    }
    const double he = t.h(j, e, a), hf = t.h(j, a, f);
    if (he == hf) return false;
    const double after = std::max(he, hf);
    if (!(after > t.h(j, e, f)) || after > eta) return false;
  }
  return true;
}

void m1_expand(BoundPair& bp, const MixedSample& x, const CategoricalDistanceTable& t) {
  for (std::size_t j = 0; j < bp.e.size(); ++j) {
    const int a = x.categorical[j];
    int& e = bp.e[j];
    int& f = bp.f[j];
    if (e == kUnsetBound && f == kUnsetBound) {
      e = a;
    } else if (a == e || a == f) {
      continue;
    } else if (f == kUnsetBound) {
      f = a;
    } else if (t.h(j, e, a) > t.h(j, a, f)) {
      f = a;
    } else if (t.h(j, a, f) > t.h(j, e, a)) {
      e = a;
    }
  }
}

bool full_overlap(const Hyperbox& i, const Hyperbox& k, std::optional<Overlap>& numeric) {
  numeric = overlap_test(i, k);
  if (i.n() > 0 && !numeric) return false;
  const auto& a = std::get<BoundPair>(i.cat);
  const auto& b = std::get<BoundPair>(k.cat);
  for (std::size_t j = 0; j < a.e.size(); ++j)
    if (!categorical_overlap(a, b, j)) return false;
  return true;
}

// Replaces one bound of box i on one categorical dimension so that the
// dimension no longer overlaps box k. Picks the replacement closest to the
// retained bound over all dimensions. Returns false when no dimension admits
// a replacement.
bool replace_categorical_bound(BoundPair& a, const BoundPair& b, const CategoricalDistanceTable& t) {
  struct Choice {
    std::size_t dim = 0;
    bool replace_e = true;
    int value = kUnsetBound;
    double h = std::numeric_limits<double>::infinity();
  };
  std::optional<Choice> best;
  for (std::size_t j = 0; j < a.e.size(); ++j) {
    auto in_k = [&](int x) { return x != kUnsetBound && (x == b.e[j] || x == b.f[j]); };
    const bool e_hit = in_k(a.e[j]);
    const bool f_hit = in_k(a.f[j]);
    if (e_hit == f_hit) continue;
    const bool replace_e = e_hit;
    const int old = replace_e ? a.e[j] : a.f[j];
    const int keep = replace_e ? a.f[j] : a.e[j];
    for (int x : t.values(j)) {
      if (x == old || x == keep || in_k(x)) continue;
      const double h = t.h(j, x, keep);
      if (!best || h < best->h) best = Choice{j, replace_e, x, h};
    }
  }
  if (!best) return false;
  (best->replace_e ? a.e : a.f)[best->dim] = best->value;
  return true;
}

std::vector<std::size_t> domain_sizes_of(const Dataset& train) {
  std::vector<std::size_t> sizes(train.r());
  for (std::size_t j = 0; j < train.r(); ++j) {
    sizes[j] = train.schema.domain(j).size();
    for (const auto& s : train.samples)
      sizes[j] = std::max(sizes[j], static_cast<std::size_t>(std::max(s.categorical[j], 0)) + 1);
  }
  return sizes;
}

}  // namespace

MixedModel train_m1(const Dataset& train, const M1Config& cfg) {
  cfg.validate();
  const std::size_t n = train.n(), r = train.r();
  const auto gamma = uniform_gamma(n, cfg.gamma);
  auto table = CategoricalDistanceTable::fit(train);
  std::vector<Hyperbox> boxes;

  auto new_box = [&](const MixedSample& x) {
    Hyperbox b;
    b.v = x.lower;
    b.w = x.upper;
    b.cat = BoundPair{x.categorical, std::vector<int>(r, kUnsetBound)};
    b.label = *x.label;
    b.cardinality = 1;
    b.creation = boxes.size();
    boxes.push_back(std::move(b));
  };

  for (const auto& x : train.samples) {
    const int label = x.label.value();
    auto cands = rank_by(boxes, label, [&](const Hyperbox& b) { return membership_m1(b, x, table, gamma); });
    if (!cands.empty() && cands.front().first == 1.0) {
      boxes[cands.front().second].cardinality += 1;
      continue;
    }
    std::optional<std::size_t> expanded;
    Hyperbox saved;
    for (const auto& [mem, idx] : cands) {
      auto& b = boxes[idx];
      if (!numeric_fits(b, x, cfg.theta)) continue;
      if (!m1_gate(std::get<BoundPair>(b.cat), x, table, cfg.eta)) continue;
      saved = b;
      expand_numeric(b, x);
      m1_expand(std::get<BoundPair>(b.cat), x, table);
      b.cardinality += 1;
      expanded = idx;
      break;
    }
    if (!expanded) {
      new_box(x);
      continue;
    }
    bool reverted = false;
    for (std::size_t k = 0; k < boxes.size() && !reverted; ++k) {
      if (boxes[k].label == label) continue;
      std::optional<Overlap> numeric;
      if (!full_overlap(boxes[*expanded], boxes[k], numeric)) continue;
      auto& bi = std::get<BoundPair>(boxes[*expanded].cat);
      if (r > 0 && replace_categorical_bound(bi, std::get<BoundPair>(boxes[k].cat), table)) continue;
      if (n > 0 && numeric) {
        contract(boxes[*expanded], boxes[k], *numeric);
      } else {
        boxes[*expanded] = saved;
        reverted = true;
      }
    }
    if (reverted) new_box(x);
  }
  return MixedModel(MixedAlgorithm::M1, cfg.gamma, n, r, std::move(boxes), std::move(table), domain_sizes_of(train));
}

MixedModel train_m2(const Dataset& train, const M2Config& cfg) {
  cfg.validate();
  const std::size_t n = train.n(), r = train.r();
  const auto gamma = uniform_gamma(n, cfg.gamma);
  const auto sizes = domain_sizes_of(train);
  const std::size_t beta = cfg.beta(r);
  std::vector<Hyperbox> boxes;

  for (const auto& x : train.samples) {
    const int label = x.label.value();
    auto cands = rank_by(boxes, label, [&](const Hyperbox& b) { return membership_m2(b, x, gamma); });
    if (!cands.empty() && cands.front().first == 1.0) {
      boxes[cands.front().second].cardinality += 1;
      continue;
    }
    std::optional<std::size_t> expanded;
    for (const auto& [mem, idx] : cands) {
      auto& b = boxes[idx];
      if (!numeric_fits(b, x, cfg.theta)) continue;
      if (matched_dims_m2(b, x) < beta) continue;
      expand_numeric(b, x);
      auto& bs = std::get<BitStrings>(b.cat);
      for (std::size_t j = 0; j < r; ++j)
        if (x.categorical[j] >= 0) bs.s[j].set(static_cast<std::size_t>(x.categorical[j]));
      b.cardinality += 1;
      expanded = idx;
      break;
    }
    if (expanded) {
      for (std::size_t k = 0; k < boxes.size(); ++k) {
        if (boxes[k].label == label) continue;
        if (auto ov = overlap_test(boxes[*expanded], boxes[k])) contract(boxes[*expanded], boxes[k], *ov);
      }
      continue;
    }
    Hyperbox b;
    b.v = x.lower;
    b.w = x.upper;
    BitStrings bs;
    for (std::size_t j = 0; j < r; ++j) {
      boost::dynamic_bitset<> bits(sizes[j]);
      if (x.categorical[j] >= 0) bits.set(static_cast<std::size_t>(x.categorical[j]));
      bs.s.push_back(std::move(bits));
    }
    b.cat = std::move(bs);
    b.label = label;
    b.cardinality = 1;
    b.creation = boxes.size();
    boxes.push_back(std::move(b));
  }
  return MixedModel(MixedAlgorithm::M2, cfg.gamma, n, r, std::move(boxes), CategoricalDistanceTable{}, sizes);
}

}  // namespace gfmm
