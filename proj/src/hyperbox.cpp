#include "gfmm/hyperbox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "gfmm/errors.hpp"

namespace gfmm {

std::vector<double> Hyperbox::center() const {
  std::vector<double> c(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) c[j] = (v[j] + w[j]) / 2.0;
  return c;
}

double ramp(double lambda, double gamma) {
  const double x = lambda * gamma;
  if (x > 1.0) return 1.0;
  if (x < 0.0) return 0.0;
  return x;
}

double membership(const std::vector<double>& v, const std::vector<double>& w, const double* xl, const double* xu,
                  const std::vector<double>& gamma) {
  double b = 1.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double above = 1.0 - ramp(xu[j] - w[j], gamma[j]);
    const double below = 1.0 - ramp(v[j] - xl[j], gamma[j]);
    b = std::min(b, std::min(above, below));
  }
  return b;
}

double membership(const Hyperbox& box, const std::vector<double>& xl, const std::vector<double>& xu,
                  const std::vector<double>& gamma) {
  if (xl.size() != box.n() || xu.size() != box.n() || gamma.size() < box.n())
    throw DimensionMismatch("membership: input arity does not match hyperbox");
  return membership(box.v, box.w, xl.data(), xu.data(), gamma);
}

std::vector<double> uniform_gamma(std::size_t n, double value) { return std::vector<double>(n, value); }

int overlap_case(double vi, double wi, double vk, double wk) {
  if (vi <= vk && vk < wi && wi <= wk) return 1;
  if (vk <= vi && vi < wk && wk <= wi) return 2;
  if (vi < vk && vk <= wk && wk < wi) return 3;
  if (vk < vi && vi <= wi && wi < wk) return 4;
  return 0;
}

std::optional<Overlap> overlap_test(const std::vector<double>& vi, const std::vector<double>& wi,
                                    const std::vector<double>& vk, const std::vector<double>& wk) {
  const std::size_t n = vi.size();
  if (n == 0) return std::nullopt;
  double delta_old = 1.0;
  std::optional<Overlap> best;
  std::optional<Overlap> first;
  for (std::size_t j = 0; j < n; ++j) {
    const int c = overlap_case(vi[j], wi[j], vk[j], wk[j]);
    double delta = 0;
    switch (c) {
      case 1: delta = wi[j] - vk[j]; break;
      case 2: delta = wk[j] - vi[j]; break;
      case 3: delta = std::min(wk[j] - vi[j], wi[j] - vk[j]); break;
      case 4: delta = std::min(wi[j] - vk[j], wk[j] - vi[j]); break;
      default: return std::nullopt;
    }
    if (!first) first = Overlap{j, c};
    if (delta < delta_old) {
      delta_old = delta;
      best = Overlap{j, c};
    }
  }
  // Every dimension overlapped by a full unit: no strict improvement on the
  // initial delta, so the first dimension is reported.
  return best ? best : first;
}

std::optional<Overlap> overlap_test(const Hyperbox& i, const Hyperbox& k) { return overlap_test(i.v, i.w, k.v, k.w); }

void contract(std::vector<double>& vi, std::vector<double>& wi, std::vector<double>& vk, std::vector<double>& wk,
              const Overlap& overlap) {
  const std::size_t d = overlap.dimension;
  switch (overlap.test_case) {
    case 1: {
      const double mid = (wi[d] + vk[d]) / 2.0;
      wi[d] = mid;
      vk[d] = mid;
      break;
    }
    case 2: {
      const double mid = (wk[d] + vi[d]) / 2.0;
      wk[d] = mid;
      vi[d] = mid;
      break;
    }
    case 3:
      if (wk[d] - vi[d] <= wi[d] - vk[d]) {
        vi[d] = wk[d];
      } else {
        wi[d] = vk[d];
      }
      break;
    case 4:
      if (wk[d] - vi[d] <= wi[d] - vk[d]) {
        wk[d] = vi[d];
      } else {
        vk[d] = wi[d];
      }
      break;
    default: break;
  }
}

void contract(Hyperbox& i, Hyperbox& k, const Overlap& overlap) { contract(i.v, i.w, k.v, k.w, overlap); }

namespace {

struct Winners {
  double best = -1;
  std::vector<std::size_t> idx;
  bool multi_class = false;
};

Winners collect_winners(const std::vector<Hyperbox>& boxes, const std::vector<double>& memberships) {
  Winners w;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (memberships[i] > w.best) {
      w.best = memberships[i];
      w.idx.assign(1, i);
    } else if (memberships[i] == w.best) {
      w.idx.push_back(i);
    }
  }
  for (auto i : w.idx)
    if (boxes[i].label != boxes[w.idx.front()].label) w.multi_class = true;
  return w;
}

}  // namespace

Prediction resolve_manhattan(const std::vector<Hyperbox>& boxes, const std::vector<double>& memberships,
                             const std::vector<double>& center) {
  Prediction p;
  if (boxes.empty()) return p;
  auto w = collect_winners(boxes, memberships);
  p.membership = w.best;
  p.winners = w.idx.size();
  p.secondary = w.multi_class;
  if (!w.multi_class) {
    p.label = boxes[w.idx.front()].label;
    return p;
  }
  std::size_t chosen = w.idx.front();
  double best_dist = std::numeric_limits<double>::infinity();
  for (auto i : w.idx) {
    const auto& b = boxes[i];
    double dist = 0;
    for (std::size_t j = 0; j < center.size(); ++j) dist += std::abs(center[j] - (b.v[j] + b.w[j]) / 2.0);
    if (dist < best_dist || (dist == best_dist && b.creation < boxes[chosen].creation)) {
      best_dist = dist;
      chosen = i;
    }
  }
  p.label = boxes[chosen].label;
  return p;
}

Prediction resolve_cardinality(const std::vector<Hyperbox>& boxes, const std::vector<double>& memberships) {
  Prediction p;
  if (boxes.empty()) return p;
  auto w = collect_winners(boxes, memberships);
  p.membership = w.best;
  p.winners = w.idx.size();
  p.secondary = w.multi_class;
  if (!w.multi_class) {
    p.label = boxes[w.idx.front()].label;
    return p;
  }
  struct ClassScore {
    double mass = 0;
    std::uint64_t oldest = std::numeric_limits<std::uint64_t>::max();
  };
  std::map<int, ClassScore> scores;
  double total = 0;
  for (auto i : w.idx) {
    const double m = static_cast<double>(boxes[i].cardinality) * memberships[i];
    auto& s = scores[boxes[i].label];
    s.mass += m;
    s.oldest = std::min(s.oldest, boxes[i].creation);
    total += m;
  }
  int chosen = -1;
  double best = -1;
  std::uint64_t oldest = 0;
  for (const auto& [label, s] : scores) {
    const double prob = total > 0 ? s.mass / total : 0.0;
    if (chosen < 0 || prob > best || (prob == best && s.oldest < oldest)) {
      chosen = label;
      best = prob;
      oldest = s.oldest;
    }
  }
  p.label = chosen;
  return p;
}

Prediction predict_manhattan(const std::vector<Hyperbox>& boxes, const std::vector<double>& xl,
                             const std::vector<double>& xu, const std::vector<double>& gamma) {
  std::vector<double> mem(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) mem[i] = membership(boxes[i], xl, xu, gamma);
  std::vector<double> center(xl.size());
  for (std::size_t j = 0; j < xl.size(); ++j) center[j] = (xl[j] + xu[j]) / 2.0;
  return resolve_manhattan(boxes, mem, center);
}

Prediction predict_cardinality(const std::vector<Hyperbox>& boxes, const std::vector<double>& xl,
                               const std::vector<double>& xu, const std::vector<double>& gamma) {
  std::vector<double> mem(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) mem[i] = membership(boxes[i], xl, xu, gamma);
  return resolve_cardinality(boxes, mem);
}

}  // namespace gfmm
