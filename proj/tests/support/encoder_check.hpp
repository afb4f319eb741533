#pragma once

// Compares the library encoders with the brute-force oracle on random tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "encoder_oracle.hpp"
#include "gfmm/dataset.hpp"
#include "gfmm/encoders.hpp"

namespace gfmm::testing {

struct OracleCheck {
  std::size_t tables = 0;
  std::size_t values_compared = 0;
  double max_error = 0;
  std::string worst;  // description of the largest deviation
};

/// Dataset whose categorical domains list `alphabet` in reverse order, so that
/// schema order and first-appearance order differ.
inline Dataset oracle_dataset(const OracleTable& t, const std::vector<std::string>& alphabet, int classes) {
  Dataset d;
  const std::size_t r = t.values.empty() ? 0 : t.values.front().size();
  std::vector<std::string> domain(alphabet.rbegin(), alphabet.rend());
  for (std::size_t j = 0; j < r; ++j) {
    const std::string name = "c" + std::to_string(j);
    d.schema.columns.push_back({name, FeatureKind::Categorical});
    d.schema.categorical_domains[name] = domain;
  }
  d.schema.class_column = "y";
  for (int c = 0; c < classes; ++c) d.class_names.push_back("k" + std::to_string(c));
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    MixedSample s;
    for (const auto& v : t.values[i])
      s.categorical.push_back(static_cast<int>(std::find(domain.begin(), domain.end(), v) - domain.begin()));
    s.label = t.labels[i];
    d.samples.push_back(std::move(s));
  }
  return d;
}

inline OracleCheck run_encoder_oracle(std::size_t tables, std::uint64_t seed, const OracleParams& prm = {}) {
  static const std::vector<std::pair<EncoderKind, std::string>> kinds{
      {EncoderKind::Label, "label"},     {EncoderKind::OneHot, "onehot"},         {EncoderKind::Sum, "sum"},
      {EncoderKind::Helmert, "helmert"}, {EncoderKind::Target, "target"},         {EncoderKind::JamesStein, "jamesstein"},
      {EncoderKind::Loo, "loo"},         {EncoderKind::CatBoost, "catboost"}};
  const std::vector<std::string> alphabet{"a", "b", "c", "d", "e", "f"};
  std::mt19937_64 rng(seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  OracleCheck out;
  EncoderParams params{prm.m, prm.z, prm.catboost_z};
  auto compare = [&](const std::vector<std::vector<double>>& expected, const EncodedMatrix& got,
                     const std::string& what) {
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (expected[i].size() != got.cols) {
        out.max_error = INFINITY;
        out.worst = what + ": width mismatch";
        return;
      }
      for (std::size_t c = 0; c < got.cols; ++c) {
        const double e = std::abs(expected[i][c] - got.at(i, c));
        ++out.values_compared;
        if (!(e <= out.max_error)) {
          out.max_error = e;
          out.worst = what + " row " + std::to_string(i) + " col " + std::to_string(c);
        }
      }
    }
  };

  for (std::size_t t = 0; t < tables; ++t) {
    const int classes = uni(2, 4);
    const std::size_t features = static_cast<std::size_t>(uni(1, 3));
    const int letters = uni(1, static_cast<int>(alphabet.size()));
    auto draw = [&](std::size_t rows, int used) {
      OracleTable tab;
      for (std::size_t i = 0; i < rows; ++i) {
        std::vector<std::string> row;
        for (std::size_t j = 0; j < features; ++j) row.push_back(alphabet[static_cast<std::size_t>(uni(0, used - 1))]);
        tab.values.push_back(row);
        tab.labels.push_back(uni(0, classes - 1));
      }
      return tab;
    };
    const auto train = draw(static_cast<std::size_t>(uni(1, 20)), letters);
    // Test rows may use letters that never occur in training.
    const auto test = draw(static_cast<std::size_t>(uni(1, 20)), static_cast<int>(alphabet.size()));
    const auto dtrain = oracle_dataset(train, alphabet, classes);
    const auto dtest = oracle_dataset(test, alphabet, classes);
    ++out.tables;

    for (const auto& [kind, name] : kinds) {
      const auto enc = FittedEncoder::fit(kind, dtrain, params);
      const auto raw_train = oracle_encode(name, train, train, classes, true, prm);
      const auto raw_test = oracle_encode(name, train, test, classes, false, prm);
      const std::string tag = name + " table " + std::to_string(t);
      compare(raw_train, enc.transform_raw(dtrain, Phase::Train), tag + " train raw");
      compare(raw_test, enc.transform_raw(dtest, Phase::Test), tag + " test raw");
      compare(oracle_rescale(raw_train, raw_train), enc.transform(dtrain, Phase::Train), tag + " train scaled");
      compare(oracle_rescale(raw_train, raw_test), enc.transform(dtest, Phase::Test), tag + " test scaled");
    }
  }
  return out;
}

}  // namespace gfmm::testing
