#include <doctest.h>

#include <random>

#include "salvage/interval.hpp"

using namespace salvage;

namespace {

IntervalSet random_set(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_int_distribution<int> count(0, 5);
  std::bernoulli_distribution flag(0.5);
  std::vector<Interval> parts;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    double a = u(rng);
    double b = u(rng);
    if (a > b) std::swap(a, b);
    parts.push_back({a, b, flag(rng), flag(rng)});
  }
  return IntervalSet(parts);
}

}  // namespace

TEST_SUITE("interval") {
  TEST_CASE("normalization merges and sorts") {
    const IntervalSet s({Interval::closed(3, 4), Interval::left_closed(0, 1), Interval::closed(1, 2)});
    REQUIRE(s.size() == 2);
    CHECK(s.str() == "[0, 2] U [3, 4]");
    CHECK(s.measure() == 3.0);
    CHECK(IntervalSet({Interval::open(1, 1)}).empty());
    CHECK(IntervalSet({Interval::open(0, 1), Interval::open(1, 2)}).size() == 2);
    CHECK(IntervalSet({Interval::open(0, 1), Interval::point(1), Interval::open(1, 2)}).size() == 1);
  }

  TEST_CASE("membership respects closedness") {
    const IntervalSet s(Interval::left_closed(0, 1));
    CHECK(s.contains(0.0));
    CHECK_FALSE(s.contains(1.0));
    CHECK(IntervalSet(Interval::point(3)).str() == "{3}");
    CHECK(IntervalSet().str() == "{}");
  }

  TEST_CASE("set algebra on the linear example") {
    const IntervalSet X(Interval::closed(0, 3));
    const IntervalSet minus(Interval::left_closed(0, 1));
    const IntervalSet plus = X.subtract(minus);
    CHECK(plus.str() == "[1, 3]");
    const IntervalSet image(Interval::left_closed(2, 3));
    CHECK(plus.subtract(image).str() == "[1, 2) U {3}");
    CHECK(X.intersect(IntervalSet(Interval::open(2, 5))).str() == "(2, 3]");
    CHECK(minus.complement_in(X).str() == "[1, 3]");
  }

  TEST_CASE("infinite ends are open") {
    const IntervalSet r(Interval{-kInf, kInf, true, true});
    CHECK(r.str() == "(-inf, inf)");
    CHECK(r.measure() == kInf);
    CHECK(r.subtract(IntervalSet(Interval::closed(0, 1))).str() == "(-inf, 0) U (1, inf)");
  }

  TEST_CASE("split_at makes left-closed pieces") {
    const auto cells = IntervalSet(Interval::closed(0, 3)).split_at({1.0, 2.0, 5.0});
    REQUIRE(cells.size() == 3);
    CHECK(cells[0].str() == "[0, 1)");
    CHECK(cells[1].str() == "[1, 2)");
    CHECK(cells[2].str() == "[2, 3]");
  }

  TEST_CASE("sample grid covers closed ends only") {
    const auto g = sample_grid(IntervalSet(Interval::left_closed(0, 1)), 11);
    REQUIRE(!g.empty());
    CHECK(g.front() == 0.0);
    CHECK(g.back() < 1.0);
  }

  TEST_CASE("property: inclusion-exclusion for measure") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 2000; ++trial) {
      const IntervalSet a = random_set(rng);
      const IntervalSet b = random_set(rng);
      const double lhs = a.unite(b).measure() + a.intersect(b).measure();
      const double rhs = a.measure() + b.measure();
      CHECK(std::fabs(lhs - rhs) <= 1e-12);
      CHECK(std::fabs(a.subtract(b).measure() + a.intersect(b).measure() - a.measure()) <= 1e-12);
      // stored intervals are sorted, disjoint and non-empty
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK_FALSE(a.intervals()[i].empty());
        if (i > 0) CHECK(a.intervals()[i - 1].hi <= a.intervals()[i].lo);
      }
    }
  }
}
