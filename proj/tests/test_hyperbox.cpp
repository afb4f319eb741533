#include <doctest.h>

#include "gfmm/errors.hpp"
#include "gfmm/hyperbox.hpp"
#include "gfmm/serialize.hpp"
#include "support/generators.hpp"

using namespace gfmm;
using gfmm::testing::Gen;

namespace {

Hyperbox make_box(std::vector<double> v, std::vector<double> w, int label = 0, std::uint64_t creation = 0,
                  std::uint64_t cardinality = 1) {
  Hyperbox b;
  b.v = std::move(v);
  b.w = std::move(w);
  b.label = label;
  b.creation = creation;
  b.cardinality = cardinality;
  return b;
}

double volume(const Hyperbox& b) {
  double p = 1;
  for (std::size_t j = 0; j < b.n(); ++j) p *= b.w[j] - b.v[j];
  return p;
}

}  // namespace

TEST_CASE("ramp function") {
  CHECK(ramp(0.5, 1) == 0.5);
  CHECK(ramp(2, 1) == 1);
  CHECK(ramp(-0.3, 1) == 0);
}

TEST_CASE("membership examples") {
  const auto b = make_box({0.2, 0.2}, {0.6, 0.6});
  const auto g = uniform_gamma(2);
  CHECK(membership(b, {0.4, 0.4}, {0.4, 0.4}, g) == 1.0);
  CHECK(membership(b, {0.7, 0.6}, {0.7, 0.6}, g) == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(membership(b, {0.2, 0.2}, {0.2, 0.2}, g) == 1.0);
  CHECK(membership(make_box({}, {}), {}, {}, {}) == 1.0);
}

TEST_CASE("property: membership lies in [0, 1] and equals 1 exactly on containment") {
  Gen gen(11);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(1, 4));
    const auto b = gen.box(n);
    auto lo = gen.point(n), hi = lo;
    for (std::size_t j = 0; j < n; ++j)
      if (gen.coin(0.3)) hi[j] = std::min(1.0, lo[j] + gen.uniform(0, 0.3));
    const auto g = uniform_gamma(n, gen.uniform(0.5, 8));
    const double m = membership(b, lo, hi, g);
    CHECK((m >= 0.0 && m <= 1.0));
    bool inside = true;
    for (std::size_t j = 0; j < n; ++j) inside = inside && b.v[j] <= lo[j] && hi[j] <= b.w[j];
    CHECK((m == 1.0) == inside);
  }
}

TEST_CASE("property: membership does not increase as a point moves away from the box") {
  Gen gen(12);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(1, 4));
    const auto b = gen.box(n);
    const auto g = uniform_gamma(n, gen.uniform(0.5, 4));
    auto x = gen.point(n);
    const std::size_t axis = gen.index(n);
    const double dir = gen.coin() ? 1.0 : -1.0;
    // Start outside or on the boundary on the side we move towards.
    x[axis] = dir > 0 ? std::max(x[axis], b.w[axis]) : std::min(x[axis], b.v[axis]);
    double prev = membership(b, x, x, g);
    for (int s = 0; s < 20; ++s) {
      x[axis] += dir * 0.05;
      const double m = membership(b, x, x, g);
      CHECK(m <= prev);
      prev = m;
    }
  }
}

TEST_CASE("overlap test examples") {
  const auto i = make_box({0.3, 0.5}, {0.4, 0.6});
  const auto k = make_box({0.35, 0.55}, {0.45, 0.7});
  CHECK(overlap_test(i, k).has_value());
  CHECK_FALSE(overlap_test(make_box({0, 0}, {0.2, 0.2}), make_box({0.5, 0.5}, {0.7, 0.7})).has_value());
}

TEST_CASE("blind spot: an identical degenerate coordinate hides the overlap") {
  const auto i = make_box({0.3, 0.5, 0.0}, {0.4, 0.6, 0.0});
  const auto k = make_box({0.35, 0.55, 0.0}, {0.45, 0.7, 0.0});
  CHECK_FALSE(overlap_test(i, k).has_value());
  CHECK(overlap_case(0, 0, 0, 0) == 0);
  CHECK(overlap_case(1, 1, 1, 1) == 0);
}

TEST_CASE("contraction examples") {
  SUBCASE("case 1 meets at the midpoint") {
    auto i = make_box({0.3}, {0.6});
    auto k = make_box({0.35}, {0.7});
    const auto o = overlap_test(i, k);
    REQUIRE(o.has_value());
    CHECK(o->test_case == 1);
    contract(i, k, *o);
    CHECK(i.w[0] == doctest::Approx(0.475));
    CHECK(k.v[0] == doctest::Approx(0.475));
    CHECK(overlap_case(i.v[0], i.w[0], k.v[0], k.w[0]) == 0);
  }
  SUBCASE("case 3 moves the lower bound of i") {
    auto i = make_box({0.1}, {0.9});
    auto k = make_box({0.2}, {0.3});
    const auto o = overlap_test(i, k);
    REQUIRE(o.has_value());
    CHECK(o->test_case == 3);
    contract(i, k, *o);
    CHECK(i.v[0] == 0.3);
    CHECK(i.w[0] == 0.9);
  }
}

TEST_CASE("property: contraction postconditions") {
  Gen gen(13);
  int contracted = 0;
  for (int t = 0; t < 5000; ++t) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(1, 4));
    auto i = gen.box(n, 0);
    auto k = gen.box(n, 1);
    const auto o = overlap_test(i, k);
    CHECK(o.has_value() == overlap_test(k, i).has_value());
    if (!o) continue;
    ++contracted;
    const auto i0 = i, k0 = k;
    contract(i, k, *o);
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(i.v[j] <= i.w[j]);
      CHECK(k.v[j] <= k.w[j]);
      if (j == o->dimension) continue;
      CHECK(i.v[j] == i0.v[j]);
      CHECK(i.w[j] == i0.w[j]);
      CHECK(k.v[j] == k0.v[j]);
      CHECK(k.w[j] == k0.w[j]);
    }
    const std::size_t d = o->dimension;
    CHECK(overlap_case(i.v[d], i.w[d], k.v[d], k.w[d]) == 0);
    CHECK(volume(i) + volume(k) <= volume(i0) + volume(k0) + 1e-15);
  }
  CHECK(contracted > 100);
}

TEST_CASE("manhattan resolution") {
  const std::vector<Hyperbox> boxes{make_box({0.0}, {0.2}, 0, 0), make_box({0.3}, {0.5}, 1, 1),
                                    make_box({0.6}, {0.8}, 2, 2)};
  SUBCASE("unique winner") {
    const auto p = resolve_manhattan(boxes, {0.5, 1.0, 0.5}, {0.4});
    CHECK(p.label == 1);
    CHECK_FALSE(p.secondary);
  }
  SUBCASE("nearest centre among winners") {
    // centres 0.1 and 0.7; input centre 0.2 -> distances 0.1 and 0.5
    const auto p = resolve_manhattan(boxes, {1.0, 0.2, 1.0}, {0.2});
    CHECK(p.label == 0);
    CHECK(p.secondary);
  }
  SUBCASE("equal distance goes to the older box") {
    // centres 0.125 and 0.875 are both 0.375 from 0.5, exactly
    const std::vector<Hyperbox> pair{make_box({0.75}, {1.0}, 2, 5), make_box({0.0}, {0.25}, 0, 3)};
    const auto p = resolve_manhattan(pair, {1.0, 1.0}, {0.5});
    CHECK(p.label == 0);
  }
  SUBCASE("interval input uses its centre") {
    const auto p = predict_manhattan(boxes, {0.55}, {0.95}, uniform_gamma(1, 1.0));
    CHECK(p.label == 2);
  }
}

TEST_CASE("cardinality resolution") {
  SUBCASE("cardinality-weighted class probability") {
    std::vector<Hyperbox> boxes{make_box({0}, {1}, 1, 0, 2), make_box({0}, {1}, 0, 1, 5)};
    const auto p = resolve_cardinality(boxes, {0.8, 0.8});
    CHECK(p.label == 0);
    CHECK(p.secondary);
  }
  SUBCASE("single winner") {
    std::vector<Hyperbox> boxes{make_box({0}, {1}, 1, 0, 2), make_box({0}, {1}, 0, 1, 5)};
    const auto p = resolve_cardinality(boxes, {0.9, 0.8});
    CHECK(p.label == 1);
    CHECK_FALSE(p.secondary);
  }
  SUBCASE("equal probabilities go to the older box") {
    std::vector<Hyperbox> boxes{make_box({0}, {1}, 3, 7), make_box({0}, {1}, 1, 2)};
    const auto p = resolve_cardinality(boxes, {0.5, 0.5});
    CHECK(p.label == 1);
    CHECK(p.secondary);
  }
  SUBCASE("same-class winners are not a secondary decision") {
    std::vector<Hyperbox> boxes{make_box({0}, {1}, 1, 0), make_box({0}, {1}, 1, 1)};
    CHECK_FALSE(resolve_cardinality(boxes, {0.5, 0.5}).secondary);
  }
}

TEST_CASE("property: box text round trip is bit exact") {
  Gen gen(14);
  for (int t = 0; t < 200; ++t) {
    std::vector<Hyperbox> boxes;
    const std::size_t n = static_cast<std::size_t>(gen.integer(0, 4));
    const int payload = gen.integer(0, 2);
    const std::size_t r = static_cast<std::size_t>(gen.integer(1, 3));
    for (int b = 0; b < gen.integer(0, 6); ++b) {
      auto box = gen.box(n, gen.integer(0, 5));
      for (auto& x : box.v) x = x * gen.uniform() / 3.0;  // non-terminating binary fractions
      box.cardinality = static_cast<std::uint64_t>(gen.integer(1, 1000));
      box.creation = static_cast<std::uint64_t>(b);
      if (payload == 1) {
        BoundPair bp;
        for (std::size_t j = 0; j < r; ++j) {
          bp.e.push_back(gen.integer(-1, 6));
          bp.f.push_back(gen.integer(-1, 6));
        }
        box.cat = bp;
      } else if (payload == 2) {
        BitStrings bs;
        for (std::size_t j = 0; j < r; ++j) {
          boost::dynamic_bitset<> s(static_cast<std::size_t>(gen.integer(1, 70)));
          for (std::size_t q = 0; q < s.size(); ++q) s[q] = gen.coin();
          bs.s.push_back(s);
        }
        box.cat = bs;
      }
      boxes.push_back(box);
    }
    const auto text = write_boxes(boxes);
    const auto back = read_boxes(text);
    CHECK(back == boxes);
    CHECK(write_boxes(back) == text);
  }
}

TEST_CASE("malformed box text is rejected") {
  CHECK_THROWS_AS(read_boxes("not a box file\n"), FormatError);
  CHECK_THROWS_AS(read_boxes("gfmm-boxes 1\ncount 1\nbox 0 1 0 2 none\nv 0.1\nw 0.2 0.3\n"), FormatError);
}
