#pragma once

// Brute-force reference encoders. Every value is recomputed from the raw
// string table by direct summation over rows, without any shared state with
// the library implementation.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace gfmm::testing {

struct OracleTable {
  std::vector<std::vector<std::string>> values;  // rows x features
  std::vector<int> labels;                       // class codes 0..classes-1
};

struct OracleParams {
  double m = 1.0;
  double z = 1.0;
  double catboost_z = 1.0;
};

inline std::vector<std::string> first_appearance(const OracleTable& t, std::size_t j) {
  std::vector<std::string> out;
  for (const auto& row : t.values)
    if (std::find(out.begin(), out.end(), row[j]) == out.end()) out.push_back(row[j]);
  return out;
}

/// Raw (unscaled) encoding of `rows` using statistics of `train`. When
/// `train_phase` is true, `rows` must be `train` itself.
inline std::vector<std::vector<double>> oracle_encode(const std::string& kind, const OracleTable& train,
                                                      const OracleTable& rows, int classes, bool train_phase,
                                                      const OracleParams& prm = {}) {
  const std::size_t features = train.values.empty() ? 0 : train.values.front().size();
  const double N = static_cast<double>(train.labels.size());
  double mean_code = 0;
  for (int c : train.labels) mean_code += c;
  mean_code /= N;
  auto class_share = [&](int cls) {
    double k = 0;
    for (int c : train.labels) k += c == cls;
    return k / N;
  };

  std::vector<std::vector<double>> out(rows.values.size());
  for (std::size_t j = 0; j < features; ++j) {
    const auto dom = first_appearance(train, j);
    const std::size_t L = dom.size();
    for (std::size_t i = 0; i < rows.values.size(); ++i) {
      const std::string& a = rows.values[i][j];
      const auto it = std::find(dom.begin(), dom.end(), a);
      const bool seen = it != dom.end();
      const std::size_t pos = static_cast<std::size_t>(it - dom.begin());
      auto& o = out[i];
      double nk = 0, sum_k = 0;
      for (std::size_t t = 0; t < train.values.size(); ++t)
        if (train.values[t][j] == a) {
          nk += 1;
          sum_k += train.labels[t];
        }
      auto nck = [&](int cls) {
        double k = 0;
        for (std::size_t t = 0; t < train.values.size(); ++t) k += train.values[t][j] == a && train.labels[t] == cls;
        return k;
      };
      const std::vector<int> target_classes = [&] {
        if (classes <= 2) return std::vector<int>{classes == 2 ? 1 : 0};
        std::vector<int> all(static_cast<std::size_t>(classes));
        for (int c = 0; c < classes; ++c) all[static_cast<std::size_t>(c)] = c;
        return all;
      }();

      if (kind == "label") {
        o.push_back(seen ? static_cast<double>(pos) : static_cast<double>(L));
      } else if (kind == "onehot") {
        for (std::size_t q = 0; q < L; ++q) o.push_back(seen && q == pos ? 1.0 : 0.0);
      } else if (kind == "sum") {
        for (std::size_t q = 1; q < L; ++q) {
          if (!seen) o.push_back(0.0);
          else if (pos == L - 1) o.push_back(-1.0);
          else o.push_back(q - 1 == pos ? 1.0 : 0.0);
        }
      } else if (kind == "helmert") {
        // Value j (1-based) >= 2: e_{j-1} = j-1, e_i = 0 for i < j-1, e_k = -1 for k >= j.
        const std::size_t jj = pos + 1;
        for (std::size_t e = 1; e < L; ++e) {
          if (!seen) o.push_back(0.0);
          else if (jj == 1) o.push_back(-1.0);
          else if (e < jj - 1) o.push_back(0.0);
          else if (e == jj - 1) o.push_back(static_cast<double>(jj - 1));
          else o.push_back(-1.0);
        }
      } else if (kind == "target") {
        for (int cls : target_classes) {
          if (!seen) {
            o.push_back(class_share(cls));
            continue;
          }
          const double lambda = 1.0 / (1.0 + std::exp(-(nk - prm.m) / prm.z));
          o.push_back(lambda * nck(cls) / nk + (1.0 - lambda) * class_share(cls));
        }
      } else if (kind == "jamesstein") {
        for (int cls : target_classes) {
          if (!seen) {
            o.push_back(class_share(cls));
            continue;
          }
          const double pk = nck(cls) / nk;
          const double pp = class_share(cls);
          const double num = pk * (1 - pk) / nk;
          const double den = num + pp * (1 - pp) / N;
          const double B = den == 0 ? 0.0 : num / den;
          o.push_back((1 - B) * pk + B * pp);
        }
      } else if (kind == "loo") {
        if (!seen) {
          o.push_back(mean_code);
        } else if (train_phase) {
          const double c = rows.labels[i];
          o.push_back(nk - 1 == 0 ? mean_code : (sum_k - c) / (nk - 1));
        } else {
          o.push_back(sum_k / nk);
        }
      } else if (kind == "catboost") {
        const double p = mean_code, z = prm.catboost_z;
        if (!seen) {
          o.push_back(mean_code);
        } else if (train_phase) {
          double s = 0, k = 0;
          for (std::size_t t = 0; t < i; ++t)
            if (train.values[t][j] == a) {
              s += train.labels[t];
              k += 1;
            }
          o.push_back((s + z * p) / (k + z));
        } else {
          o.push_back((sum_k + z * p) / (nk + z));
        }
      }
    }
  }
  return out;
}

/// Min-max rescaling of `rows` by the column ranges of `train_raw`, clipped to [0, 1].
inline std::vector<std::vector<double>> oracle_rescale(const std::vector<std::vector<double>>& train_raw,
                                                       std::vector<std::vector<double>> rows) {
  if (train_raw.empty()) return rows;
  const std::size_t cols = train_raw.front().size();
  for (std::size_t c = 0; c < cols; ++c) {
    double lo = train_raw[0][c], hi = train_raw[0][c];
    for (const auto& r : train_raw) {
      lo = std::min(lo, r[c]);
      hi = std::max(hi, r[c]);
    }
    for (auto& r : rows) r[c] = hi > lo ? std::clamp((r[c] - lo) / (hi - lo), 0.0, 1.0) : 0.0;
  }
  return rows;
}

}  // namespace gfmm::testing
