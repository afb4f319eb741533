#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "gfmm/errors.hpp"
#include "gfmm/learners.hpp"

namespace gfmm {

IntervalData IntervalData::from_points(std::size_t rows, std::size_t dims, std::vector<double> values,
                                       std::vector<int> labels) {
  if (values.size() != rows * dims) throw DimensionMismatch("value table size does not match rows x dims");
  IntervalData d;
  d.rows = rows;
  d.dims = dims;
  d.lower = values;
  d.upper = std::move(values);
  d.labels = std::move(labels);
  return d;
}

IntervalData IntervalData::from_numeric(const Dataset& data) {
  IntervalData d;
  d.rows = data.size();
  d.dims = data.n();
  d.lower.reserve(d.rows * d.dims);
  d.upper.reserve(d.rows * d.dims);
  for (const auto& s : data.samples) {
    d.lower.insert(d.lower.end(), s.lower.begin(), s.lower.end());
    d.upper.insert(d.upper.end(), s.upper.begin(), s.upper.end());
    d.labels.push_back(s.label.value_or(-1));
  }
  return d;
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Onln: return "onln";
    case Algorithm::Iol: return "iol";
    case Algorithm::AggloSm: return "agglo-sm";
    case Algorithm::Agglo2: return "agglo2";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "onln") return Algorithm::Onln;
  if (name == "iol") return Algorithm::Iol;
  if (name == "agglo-sm" || name == "aggloSM" || name == "agglosm") return Algorithm::AggloSm;
  if (name == "agglo2" || name == "agglo-2") return Algorithm::Agglo2;
  throw ConfigError("unknown algorithm '" + name + "'");
}

std::string to_string(SimilarityKind k) {
  switch (k) {
    case SimilarityKind::LongestDistance: return "longest";
    case SimilarityKind::ShortestDistance: return "shortest";
    case SimilarityKind::Midpoint: return "midpoint";
  }
  return "?";
}

SimilarityKind parse_similarity(const std::string& name) {
  if (name == "longest" || name == "longest-distance") return SimilarityKind::LongestDistance;
  if (name == "shortest" || name == "shortest-distance") return SimilarityKind::ShortestDistance;
  if (name == "midpoint") return SimilarityKind::Midpoint;
  throw ConfigError("unknown similarity '" + name + "'");
}

void NumericLearnerConfig::validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in (0, 1]");
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw ConfigError("sigma must lie in [0, 1]");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
}

GfmmModel::GfmmModel(NumericLearnerConfig cfg, std::size_t dims, std::vector<Hyperbox> boxes)
    : cfg_(cfg), dims_(dims), gamma_(uniform_gamma(dims, cfg.gamma)), boxes_(std::move(boxes)) {}

Prediction GfmmModel::predict(const double* xl, const double* xu) const {
  std::vector<double> mem(boxes_.size());
  for (std::size_t i = 0; i < boxes_.size(); ++i) mem[i] = membership(boxes_[i].v, boxes_[i].w, xl, xu, gamma_);
  if (cfg_.algorithm == Algorithm::Onln) {
    std::vector<double> center(dims_);
    for (std::size_t j = 0; j < dims_; ++j) center[j] = (xl[j] + xu[j]) / 2.0;
    return resolve_manhattan(boxes_, mem, center);
  }
  return resolve_cardinality(boxes_, mem);
}

std::vector<Prediction> GfmmModel::predict_all(const IntervalData& data) const {
  if (data.dims != dims_) throw DimensionMismatch("prediction input arity does not match model");
  std::vector<Prediction> out(data.rows);
  for (std::size_t i = 0; i < data.rows; ++i) out[i] = predict(data.lo(i), data.hi(i));
  return out;
}

namespace {

Hyperbox point_box(const IntervalData& d, std::size_t row, std::uint64_t creation) {
  Hyperbox b;
  b.v.assign(d.lo(row), d.lo(row) + d.dims);
  b.w.assign(d.hi(row), d.hi(row) + d.dims);
  b.label = d.labels[row];
  b.cardinality = 1;
  b.creation = creation;
  return b;
}

bool within_theta(const Hyperbox& b, const double* xl, const double* xu, double theta) {
  for (std::size_t j = 0; j < b.v.size(); ++j)
    if (std::max(b.w[j], xu[j]) - std::min(b.v[j], xl[j]) > theta) return false;
  return true;
}

bool merge_within_theta(const Hyperbox& a, const Hyperbox& b, double theta) {
  return within_theta(a, b.v.data(), b.w.data(), theta);
}

bool overlaps(const double* vi, const double* wi, const Hyperbox& k) {
  for (std::size_t j = 0; j < k.v.size(); ++j)
    if (overlap_case(vi[j], wi[j], k.v[j], k.w[j]) == 0) return false;
  return !k.v.empty();
}

// True when [v, w] overlaps any live box of another class.
bool overlaps_other_class(const std::vector<double>& v, const std::vector<double>& w, int label,
                          const std::vector<Hyperbox>& boxes, const std::vector<char>* alive = nullptr) {
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    if (alive && !(*alive)[k]) continue;
    if (boxes[k].label == label) continue;
    if (overlaps(v.data(), w.data(), boxes[k])) return true;
  }
  return false;
}

// Same-class candidates ranked by membership, descending, ties by creation.
std::vector<std::pair<double, std::size_t>> ranked_candidates(const std::vector<Hyperbox>& boxes, int label,
                                                               const double* xl, const double* xu,
                                                               const std::vector<double>& gamma) {
  std::vector<std::pair<double, std::size_t>> out;
  for (std::size_t i = 0; i < boxes.size(); ++i)
    if (boxes[i].label == label) out.emplace_back(membership(boxes[i].v, boxes[i].w, xl, xu, gamma), i);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  return out;
}

}  // namespace

GfmmModel train_onln(const IntervalData& d, const NumericLearnerConfig& cfg, OnlineTrace* trace) {
  cfg.validate();
  const auto gamma = uniform_gamma(d.dims, cfg.gamma);
  std::vector<Hyperbox> boxes;
  std::vector<std::uint64_t> contractions;
  if (trace) {
    trace->absorbing_box.assign(d.rows, 0);
    trace->contractions_seen.assign(d.rows, 0);
  }
  for (std::size_t row = 0; row < d.rows; ++row) {
    const double* xl = d.lo(row);
    const double* xu = d.hi(row);
    const int label = d.labels[row];
    auto cands = ranked_candidates(boxes, label, xl, xu, gamma);
    std::optional<std::size_t> absorbed;
    if (!cands.empty() && cands.front().first == 1.0) {
      absorbed = cands.front().second;
      boxes[*absorbed].cardinality += 1;
    } else {
      for (const auto& [mem, idx] : cands) {
        auto& b = boxes[idx];
        if (!within_theta(b, xl, xu, cfg.theta)) continue;
        for (std::size_t j = 0; j < d.dims; ++j) {
          b.v[j] = std::min(b.v[j], xl[j]);
          b.w[j] = std::max(b.w[j], xu[j]);
        }
        b.cardinality += 1;
        absorbed = idx;
        break;
      }
      if (absorbed) {
        for (std::size_t k = 0; k < boxes.size(); ++k) {
          if (boxes[k].label == label) continue;
          if (auto ov = overlap_test(boxes[*absorbed], boxes[k])) {
            contract(boxes[*absorbed], boxes[k], *ov);
            ++contractions[*absorbed];
            ++contractions[k];
          }
        }
      } else {
        boxes.push_back(point_box(d, row, boxes.size()));
        contractions.push_back(0);
        absorbed = boxes.size() - 1;
      }
    }
    if (trace) {
      trace->absorbing_box[row] = *absorbed;
      trace->contractions_seen[row] = contractions[*absorbed];
    }
  }
  if (trace) trace->box_contractions = contractions;
  return GfmmModel(cfg, d.dims, std::move(boxes));
}

GfmmModel train_iol(const IntervalData& d, const NumericLearnerConfig& cfg) {
  cfg.validate();
  const auto gamma = uniform_gamma(d.dims, cfg.gamma);
  std::vector<Hyperbox> boxes;
  std::vector<double> v(d.dims), w(d.dims);
  for (std::size_t row = 0; row < d.rows; ++row) {
    const double* xl = d.lo(row);
    const double* xu = d.hi(row);
    const int label = d.labels[row];
    auto cands = ranked_candidates(boxes, label, xl, xu, gamma);
    if (!cands.empty() && cands.front().first == 1.0) {
      boxes[cands.front().second].cardinality += 1;
      continue;
    }
    bool expanded = false;
    for (const auto& [mem, idx] : cands) {
      auto& b = boxes[idx];
      if (!within_theta(b, xl, xu, cfg.theta)) continue;
      for (std::size_t j = 0; j < d.dims; ++j) {
        v[j] = std::min(b.v[j], xl[j]);
        w[j] = std::max(b.w[j], xu[j]);
      }
      if (overlaps_other_class(v, w, label, boxes)) continue;
      b.v = v;
      b.w = w;
      b.cardinality += 1;
      expanded = true;
      break;
    }
    if (!expanded) boxes.push_back(point_box(d, row, boxes.size()));
  }
  return GfmmModel(cfg, d.dims, std::move(boxes));
}

double similarity(const Hyperbox& i, const Hyperbox& k, SimilarityKind kind, const std::vector<double>& gamma) {
  double s = 1.0;
  for (std::size_t j = 0; j < i.v.size(); ++j) {
    double dist = 0;
    switch (kind) {
      case SimilarityKind::LongestDistance: dist = std::max(k.w[j] - i.v[j], i.w[j] - k.v[j]); break;
      case SimilarityKind::ShortestDistance: dist = std::max(k.v[j] - i.w[j], i.v[j] - k.w[j]); break;
      case SimilarityKind::Midpoint: dist = std::abs((k.v[j] + k.w[j]) / 2.0 - (i.v[j] + i.w[j]) / 2.0); break;
    }
    s = std::min(s, 1.0 - ramp(dist, gamma[j]));
  }
  return s;
}

namespace {

void merge_into(Hyperbox& a, const Hyperbox& b) {
  for (std::size_t j = 0; j < a.v.size(); ++j) {
    a.v[j] = std::min(a.v[j], b.v[j]);
    a.w[j] = std::max(a.w[j], b.w[j]);
  }
  a.cardinality += b.cardinality;
}

bool can_merge(const std::vector<Hyperbox>& boxes, const std::vector<char>& alive, std::size_t a, std::size_t b,
               double theta, std::vector<double>& v, std::vector<double>& w) {
  const auto& A = boxes[a];
  const auto& B = boxes[b];
  if (!merge_within_theta(A, B, theta)) return false;
  for (std::size_t j = 0; j < A.v.size(); ++j) {
    v[j] = std::min(A.v[j], B.v[j]);
    w[j] = std::max(A.w[j], B.w[j]);
  }
  return !overlaps_other_class(v, w, A.label, boxes, &alive);
}

std::vector<Hyperbox> compact(std::vector<Hyperbox>& boxes, const std::vector<char>& alive) {
  std::vector<Hyperbox> out;
  for (std::size_t i = 0; i < boxes.size(); ++i)
    if (alive[i]) out.push_back(std::move(boxes[i]));
  return out;
}

}  // namespace

GfmmModel train_agglo_sm(const IntervalData& d, const NumericLearnerConfig& cfg) {
  cfg.validate();
  const auto gamma = uniform_gamma(d.dims, cfg.gamma);
  std::vector<Hyperbox> boxes;
  for (std::size_t row = 0; row < d.rows; ++row) boxes.push_back(point_box(d, row, row));
  std::vector<char> alive(boxes.size(), 1);
  std::vector<std::uint32_t> version(boxes.size(), 0);

  struct Entry {
    double s;
    std::size_t a, b;  // a < b by creation index
    std::uint32_t va, vb;
  };
  auto worse = [](const Entry& x, const Entry& y) {
    if (x.s != y.s) return x.s < y.s;
    if (x.a != y.a) return x.a > y.a;
    return x.b > y.b;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);

  // Pairs violating the size limit stay infeasible because boxes only grow.
  auto push_pair = [&](std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    if (!merge_within_theta(boxes[a], boxes[b], cfg.theta)) return;
    double s = similarity(boxes[a], boxes[b], cfg.similarity, gamma);
    if (s < cfg.sigma) return;
    heap.push(Entry{s, a, b, version[a], version[b]});
  };
  for (std::size_t a = 0; a < boxes.size(); ++a)
    for (std::size_t b = a + 1; b < boxes.size(); ++b)
      if (boxes[a].label == boxes[b].label) push_pair(a, b);

  std::vector<double> v(d.dims), w(d.dims);
  while (!heap.empty()) {
    Entry e = heap.top();
    heap.pop();
    if (!alive[e.a] || !alive[e.b] || version[e.a] != e.va || version[e.b] != e.vb) continue;
    if (!can_merge(boxes, alive, e.a, e.b, cfg.theta, v, w)) continue;
    merge_into(boxes[e.a], boxes[e.b]);
    alive[e.b] = 0;
    ++version[e.a];
    for (std::size_t k = 0; k < boxes.size(); ++k)
      if (k != e.a && alive[k] && boxes[k].label == boxes[e.a].label) push_pair(e.a, k);
  }
  return GfmmModel(cfg, d.dims, compact(boxes, alive));
}

GfmmModel train_agglo2(const IntervalData& d, const NumericLearnerConfig& cfg) {
  cfg.validate();
  const auto gamma = uniform_gamma(d.dims, cfg.gamma);
  std::vector<Hyperbox> boxes;
  for (std::size_t row = 0; row < d.rows; ++row) boxes.push_back(point_box(d, row, row));
  std::vector<char> alive(boxes.size(), 1);
  std::vector<double> v(d.dims), w(d.dims);
  std::vector<std::pair<double, std::size_t>> cands;

  bool merged_any = true;
  while (merged_any) {
    merged_any = false;
    for (std::size_t a = 0; a < boxes.size(); ++a) {
      if (!alive[a]) continue;
      cands.clear();
      for (std::size_t k = 0; k < boxes.size(); ++k) {
        if (k == a || !alive[k] || boxes[k].label != boxes[a].label) continue;
        if (!merge_within_theta(boxes[a], boxes[k], cfg.theta)) continue;
        double s = similarity(boxes[a], boxes[k], cfg.similarity, gamma);
        if (s >= cfg.sigma) cands.emplace_back(s, k);
      }
      std::stable_sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
      for (const auto& [s, k] : cands) {
        if (!can_merge(boxes, alive, a, k, cfg.theta, v, w)) continue;
        merge_into(boxes[a], boxes[k]);
        alive[k] = 0;
        merged_any = true;
        break;
      }
    }
  }
  return GfmmModel(cfg, d.dims, compact(boxes, alive));
}

GfmmModel train_numeric(const IntervalData& train, const NumericLearnerConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::Onln: return train_onln(train, cfg);
    case Algorithm::Iol: return train_iol(train, cfg);
    case Algorithm::AggloSm: return train_agglo_sm(train, cfg);
    case Algorithm::Agglo2: return train_agglo2(train, cfg);
  }
  throw ConfigError("unknown algorithm");
}

std::size_t count_interclass_overlaps(const std::vector<Hyperbox>& boxes) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < boxes.size(); ++i)
    for (std::size_t k = i + 1; k < boxes.size(); ++k)
      if (boxes[i].label != boxes[k].label && overlap_test(boxes[i], boxes[k])) ++count;
  return count;
}

}  // namespace gfmm
