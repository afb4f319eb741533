#include <doctest.h>

#include <cmath>

#include "gfmm/errors.hpp"
#include "gfmm/mixed.hpp"
#include "support/generators.hpp"

using namespace gfmm;
using gfmm::testing::Gen;

namespace {

/// One numeric feature and one categorical feature over {v0, v1, v2}.
Dataset small(const std::vector<std::tuple<double, int, int>>& rows) {
  Gen gen(0);
  Dataset d = gen.mixed(0, 1, 1, 2, 3);
  for (const auto& [x, c, y] : rows) d.samples.push_back(MixedSample{{x}, {x}, {c}, y});
  return d;
}

}  // namespace

TEST_CASE("distance table examples") {
  // v0 and v1 are always class 0, v2 always class 1.
  const auto d = small({{0.1, 0, 0}, {0.2, 1, 0}, {0.3, 2, 1}, {0.4, 0, 0}, {0.5, 2, 1}});
  const auto t = CategoricalDistanceTable::fit(d);
  CHECK(t.distance(0, 0, 1) == 0.0);
  CHECK(t.distance(0, 0, 2) == doctest::Approx(std::sqrt(2.0)));
  CHECK(t.h(0, 0, 2) == doctest::Approx(1.0));
  CHECK(t.h(0, 0, kUnsetBound) == 0.0);
  CHECK(t.h(0, kUnsetBound, 2) == 0.0);
  CHECK(t.h(0, 1, 1) == 0.0);
}

TEST_CASE("XOR data gives zero distance between all categorical values") {
  Gen gen(0);
  Dataset d = gen.mixed(0, 0, 2, 2, 2);
  for (int rep = 0; rep < 3; ++rep)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) d.samples.push_back(MixedSample{{}, {}, {a, b}, a ^ b});
  const auto t = CategoricalDistanceTable::fit(d);
  for (std::size_t f = 0; f < 2; ++f) CHECK(t.distance(f, 0, 1) == 0.0);
}

TEST_CASE("property: distance table is symmetric with a zero diagonal") {
  Gen gen(31);
  for (int t = 0; t < 200; ++t) {
    const int domain = gen.integer(1, 6);
    const auto d = gen.mixed(static_cast<std::size_t>(gen.integer(1, 40)), 0, static_cast<std::size_t>(gen.integer(1, 3)),
                             gen.integer(2, 4), domain);
    const auto table = CategoricalDistanceTable::fit(d);
    for (std::size_t f = 0; f < table.features(); ++f) {
      for (int a : table.values(f)) {
        CHECK(table.distance(f, a, a) == 0.0);
        for (int b : table.values(f)) {
          CHECK(table.distance(f, a, b) == table.distance(f, b, a));
          CHECK(table.h(f, a, b) == table.h(f, b, a));
          CHECK((table.h(f, a, b) >= 0.0 && table.h(f, a, b) <= 1.0));
        }
      }
    }
  }
}

TEST_CASE("M1 membership examples") {
  const auto d = small({{0.1, 0, 0}, {0.2, 1, 0}, {0.3, 2, 1}, {0.4, 0, 0}, {0.5, 2, 1}});
  const auto t = CategoricalDistanceTable::fit(d);
  Hyperbox box;
  box.v = {0.1};
  box.w = {0.4};
  box.cat = BoundPair{{0}, {kUnsetBound}};
  const auto g = uniform_gamma(1);
  CHECK(membership_m1(box, MixedSample{{0.2}, {0.2}, {0}, 0}, t, g) == 1.0);
  // v1 has the same class profile as v0 and an unset bound is at distance 0.
  CHECK(membership_m1(box, MixedSample{{0.2}, {0.2}, {1}, 0}, t, g) == 1.0);
  CHECK(membership_m1(box, MixedSample{{0.2}, {0.2}, {2}, 0}, t, g) == 0.0);
}

TEST_CASE("M1 training: first sample seeds E and the next close value fills F") {
  const auto d = small({{0.50, 0, 0}, {0.52, 1, 0}, {0.90, 2, 1}, {0.51, 0, 0}});
  M1Config cfg;
  cfg.theta = 0.5;
  cfg.eta = 0.1;
  const auto m = train_m1(d, cfg);
  REQUIRE(m.boxes().size() == 2);
  const auto& bp = std::get<BoundPair>(m.boxes()[0].cat);
  CHECK(bp.e == std::vector<int>{0});
  CHECK(bp.f == std::vector<int>{1});
  CHECK(m.predict(MixedSample{{0.51}, {0.51}, {1}, std::nullopt}).label == 0);
}

TEST_CASE("M2 membership averages the numeric and categorical terms") {
  Hyperbox box;
  box.v = {0.0};
  box.w = {1.0};
  BitStrings bs;
  for (int j = 0; j < 4; ++j) bs.s.emplace_back(3);
  bs.s[0].set(1);
  bs.s[1].set(2);
  bs.s[2].set(0);
  box.cat = bs;
  const MixedSample x{{0.5}, {0.5}, {1, 2, 1, 1}, 0};
  CHECK(matched_dims_m2(box, x) == 2);
  CHECK(membership_m2(box, x, uniform_gamma(1)) == doctest::Approx(0.75));
  const MixedSample numeric_only{{0.5}, {0.5}, {}, 0};
  Hyperbox plain;
  plain.v = {0.0};
  plain.w = {1.0};
  plain.cat = BitStrings{};
  CHECK(membership_m2(plain, numeric_only, uniform_gamma(1)) == 1.0);
}

TEST_CASE("M2 beta threshold") {
  M2Config c;
  c.beta_fraction = 0.25;
  CHECK(c.beta(4) == 1);
  CHECK(c.beta(2) == 1);
  c.beta_fraction = 0.0;
  CHECK(c.beta(4) == 0);
  c.beta_fraction = 1.0;
  CHECK(c.beta(3) == 3);
  c.beta_fraction = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("property: setting more bits never lowers M2 membership") {
  Gen gen(32);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(0, 3));
    const std::size_t r = static_cast<std::size_t>(gen.integer(1, 4));
    const std::size_t domain = static_cast<std::size_t>(gen.integer(1, 8));
    Hyperbox box = gen.box(n);
    BitStrings bs;
    for (std::size_t j = 0; j < r; ++j) {
      boost::dynamic_bitset<> s(domain);
      for (std::size_t q = 0; q < domain; ++q) s[q] = gen.coin(0.3);
      bs.s.push_back(s);
    }
    box.cat = bs;
    MixedSample x;
    x.lower = gen.point(n);
    x.upper = x.lower;
    for (std::size_t j = 0; j < r; ++j) x.categorical.push_back(gen.integer(0, static_cast<int>(domain) - 1));
    const auto g = uniform_gamma(n);
    const double before = membership_m2(box, x, g);
    Hyperbox wider = box;
    auto& ws = std::get<BitStrings>(wider.cat);
    for (auto& s : ws.s) {
      boost::dynamic_bitset<> extra(domain);
      for (std::size_t q = 0; q < domain; ++q) extra[q] = gen.coin(0.5);
      s |= extra;
    }
    CHECK(membership_m2(wider, x, g) >= before);
  }
}

TEST_CASE("property: trained mixed models classify their own point boxes") {
  Gen gen(33);
  for (int t = 0; t < 30; ++t) {
    const auto d = gen.mixed(30, 2, 2, 2, 3);
    M1Config c1;
    c1.theta = 0.3;
    M2Config c2;
    c2.theta = 0.3;
    const auto m1 = train_m1(d, c1);
    const auto m2 = train_m2(d, c2);
    std::uint64_t mass1 = 0, mass2 = 0;
    for (const auto& b : m1.boxes()) mass1 += b.cardinality;
    for (const auto& b : m2.boxes()) mass2 += b.cardinality;
    CHECK(mass1 == d.size());
    CHECK(mass2 == d.size());
    for (const auto& p : m1.predict_all(d)) CHECK((p.label >= 0 && p.label < 2));
    for (const auto& p : m2.predict_all(d)) CHECK((p.label >= 0 && p.label < 2));
  }
}
