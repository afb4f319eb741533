#include <doctest.h>

#include <cmath>

#include "gfmm/encoders.hpp"
#include "gfmm/errors.hpp"
#include "support/encoder_check.hpp"

using namespace gfmm;
using gfmm::testing::OracleTable;
using gfmm::testing::oracle_dataset;

namespace {

const std::vector<std::string> kAlphabet{"red", "green", "blue", "pink"};

Dataset table(std::vector<std::string> values, std::vector<int> labels, int classes = 2) {
  OracleTable t;
  for (auto& v : values) t.values.push_back({v});
  t.labels = std::move(labels);
  return oracle_dataset(t, kAlphabet, classes);
}

std::vector<double> row(const EncodedMatrix& m, std::size_t r) {
  return {m.values.begin() + static_cast<std::ptrdiff_t>(r * m.cols),
          m.values.begin() + static_cast<std::ptrdiff_t>((r + 1) * m.cols)};
}

}  // namespace

TEST_CASE("label encoding follows first appearance in training") {
  const auto d = table({"red", "green", "blue", "green"}, {0, 1, 0, 1});
  const auto enc = FittedEncoder::fit(EncoderKind::Label, d);
  const auto m = enc.transform_raw(d, Phase::Test);
  CHECK(m.at(0, 0) == 0);
  CHECK(m.at(1, 0) == 1);
  CHECK(m.at(2, 0) == 2);
  CHECK(enc.unseen_components(0) == std::vector<double>{3});
}

TEST_CASE("target encoder smooths towards the prior") {
  // value red: N_k = 4 with three positives; N = 10 with five positives.
  const auto d = table({"red", "red", "red", "red", "green", "green", "green", "green", "green", "green"},
                       {1, 1, 1, 0, 1, 1, 0, 0, 0, 0});
  const auto m = FittedEncoder::fit(EncoderKind::Target, d).transform_raw(d, Phase::Test);
  const double lambda = 1.0 / (1.0 + std::exp(-3.0));
  CHECK(target_lambda(4, 1, 1) == doctest::Approx(lambda).epsilon(1e-15));
  CHECK(m.at(0, 0) == doctest::Approx(lambda * 0.75 + (1 - lambda) * 0.5).epsilon(1e-14));
  CHECK(m.at(0, 0) == doctest::Approx(0.7381435317056083).epsilon(1e-14));
}

TEST_CASE("target encoder: unseen value gets the class prior") {
  const auto d = table({"red", "red", "green", "green", "green"}, {1, 1, 0, 0, 0});
  const auto enc = FittedEncoder::fit(EncoderKind::Target, d);
  CHECK(enc.unseen_components(0)[0] == doctest::Approx(0.4));
  const auto test = table({"pink"}, {0});
  CHECK(enc.transform_raw(test, Phase::Test).at(0, 0) == doctest::Approx(0.4));
}

TEST_CASE("james-stein is fixed at the prior when p_k equals it") {
  const auto d = table({"red", "red", "green", "green"}, {1, 0, 1, 0});
  const auto m = FittedEncoder::fit(EncoderKind::JamesStein, d).transform_raw(d, Phase::Test);
  CHECK(m.at(0, 0) == doctest::Approx(0.5));
  CHECK(m.at(2, 0) == doctest::Approx(0.5));
}

TEST_CASE("leave-one-out: train rows exclude themselves") {
  const auto d = table({"red", "red", "red"}, {1, 0, 1});
  const auto enc = FittedEncoder::fit(EncoderKind::Loo, d);
  const auto train = enc.transform_raw(d, Phase::Train);
  CHECK(train.at(0, 0) == doctest::Approx(0.5));
  CHECK(train.at(1, 0) == doctest::Approx(1.0));
  CHECK(train.at(2, 0) == doctest::Approx(0.5));
  CHECK(enc.transform_raw(table({"red"}, {0}), Phase::Test).at(0, 0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("leave-one-out: a singleton category falls back to the global mean") {
  const auto d = table({"red", "green", "green"}, {1, 0, 1});
  const auto train = FittedEncoder::fit(EncoderKind::Loo, d).transform_raw(d, Phase::Train);
  CHECK(train.at(0, 0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("catboost: first occurrence encodes to the global mean") {
  const auto d = table({"red", "green", "red", "blue"}, {1, 0, 0, 1});
  const auto train = FittedEncoder::fit(EncoderKind::CatBoost, d).transform_raw(d, Phase::Train);
  CHECK(train.at(0, 0) == doctest::Approx(0.5));
  CHECK(train.at(1, 0) == doctest::Approx(0.5));
  CHECK(train.at(3, 0) == doctest::Approx(0.5));
  CHECK(train.at(2, 0) == doctest::Approx((1 + 0.5) / 2));
}

TEST_CASE("catboost training encoding depends on row order") {
  const auto d1 = table({"red", "red", "red"}, {1, 0, 0});
  const auto d2 = table({"red", "red", "red"}, {0, 0, 1});
  const auto a = FittedEncoder::fit(EncoderKind::CatBoost, d1).transform_raw(d1, Phase::Train);
  const auto b = FittedEncoder::fit(EncoderKind::CatBoost, d2).transform_raw(d2, Phase::Train);
  CHECK(a.at(1, 0) != b.at(1, 0));
}

TEST_CASE("contrast codings over a three-value domain") {
  const auto d = table({"red", "green", "blue"}, {0, 1, 0});
  const auto helmert = FittedEncoder::fit(EncoderKind::Helmert, d).transform_raw(d, Phase::Test);
  CHECK(row(helmert, 0) == std::vector<double>{-1, -1});
  CHECK(row(helmert, 1) == std::vector<double>{1, -1});
  CHECK(row(helmert, 2) == std::vector<double>{0, 2});
  const auto sum = FittedEncoder::fit(EncoderKind::Sum, d).transform_raw(d, Phase::Test);
  CHECK(row(sum, 0) == std::vector<double>{1, 0});
  CHECK(row(sum, 1) == std::vector<double>{0, 1});
  CHECK(row(sum, 2) == std::vector<double>{-1, -1});
  const auto onehot = FittedEncoder::fit(EncoderKind::OneHot, d);
  CHECK(row(onehot.transform_raw(d, Phase::Test), 1) == std::vector<double>{0, 1, 0});
  CHECK(row(onehot.transform_raw(table({"pink"}, {0}), Phase::Test), 0) == std::vector<double>{0, 0, 0});
}

TEST_CASE("rescaled output lies in [0, 1] and test values are clipped") {
  const auto d = table({"red", "green", "blue"}, {0, 1, 0});
  const auto enc = FittedEncoder::fit(EncoderKind::Label, d);
  const auto test = enc.transform(table({"pink"}, {0}), Phase::Test);
  CHECK(test.at(0, 0) == 1.0);
  for (double v : enc.transform(d, Phase::Train).values) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("class-statistic encoders reject unseen codes in training rows") {
  auto d = table({"red", "green"}, {0, 1});
  d.samples[0].categorical[0] = kUnseen;
  CHECK_THROWS_AS(FittedEncoder::fit(EncoderKind::Target, d), UnknownCategory);
}

TEST_CASE("all encoders agree with the brute-force oracle on 200 random tables") {
  const auto check = gfmm::testing::run_encoder_oracle(200, 20240601);
  INFO(check.worst);
  CHECK(check.tables == 200);
  CHECK(check.values_compared > 0);
  CHECK(check.max_error <= 1e-12);
  const auto smoothed = gfmm::testing::run_encoder_oracle(50, 7, {3.0, 0.5, 2.0});
  INFO(smoothed.worst);
  CHECK(smoothed.max_error <= 1e-12);
}
