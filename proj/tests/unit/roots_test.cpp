#include <doctest.h>

#include <random>

#include "salvage/error.hpp"
#include "salvage/numerics.hpp"

using namespace salvage;

namespace {

const IntervalSet unit01(Interval::closed(0, 1));

// Critical points of 2 - x + 12x^2 - 12x^3 by the quadratic formula.
double crit(int sign) { return (24.0 + sign * std::sqrt(24.0 * 24.0 - 4.0 * 36.0)) / 72.0; }

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("isolate_roots examples") {
    const IntervalSet X(Interval::closed(0, 3));
    const RealFn w = parse("x - 1", {}, Interval::closed(0, 3));
    auto r = isolate_roots(w, X, default_grid_h(X));
    REQUIRE(r.size() == 1);
    CHECK(r[0] == 1.0);
    CHECK(isolate_roots(parse("1", {}, Interval::closed(0, 1)), unit01, 1e-3).empty());
    const IntervalSet G(Interval::closed(-10, 10));
    r = isolate_roots(parse("(1 + 2*x)*phi(x)", {}, Interval::closed(-10, 10)), G, default_grid_h(G));
    REQUIRE(r.size() == 1);
    CHECK(r[0] == doctest::Approx(-0.5).epsilon(1e-12));
  }

  TEST_CASE("roots are sorted and bracketed to 1e-12") {
    const IntervalSet X(Interval::closed(-3, 3));
    const RealFn f = parse("(x - 0.3)*(x + 1.7)*(x - 2.05)", {}, Interval::closed(-3, 3));
    const auto r = isolate_roots(f, X, 1e-3);
    REQUIRE(r.size() == 3);
    CHECK(std::fabs(r[0] + 1.7) <= 1e-12);
    CHECK(std::fabs(r[1] - 0.3) <= 1e-12);
    CHECK(std::fabs(r[2] - 2.05) <= 1e-12);
  }

  TEST_CASE("monotone_segments examples") {
    const RealFn q1 = parse("x + 2", {}, Interval::closed(0, 1));
    auto s = monotone_segments(q1, IntervalSet(Interval::left_closed(0, 1)), 1e-3);
    REQUIRE(s.size() == 1);
    CHECK(s[0].direction == Direction::Increasing);

    const RealFn q2 = parse("2 - x + 12*x^2 - 12*x^3", {}, Interval::closed(0, 1));
    s = monotone_segments(q2, unit01, default_grid_h(unit01));
    REQUIRE(s.size() == 3);
    CHECK(s[0].direction == Direction::Decreasing);
    CHECK(s[1].direction == Direction::Increasing);
    CHECK(s[2].direction == Direction::Decreasing);
    CHECK(s[0].interval.hi == doctest::Approx(crit(-1)).epsilon(1e-10));
    CHECK(s[1].interval.hi == doctest::Approx(crit(+1)).epsilon(1e-10));
    CHECK(s[0].interval.hi == doctest::Approx(0.0447).epsilon(1e-2));
    CHECK(s[1].interval.hi == doctest::Approx(0.622).epsilon(1e-3));

    s = monotone_segments(parse("4", {}, Interval::closed(0, 1)), unit01, 1e-3);
    REQUIRE(s.size() == 1);
    CHECK(s[0].direction == Direction::Constant);
  }

  TEST_CASE("segments merge across smooth piece boundaries and split at folds") {
    const RealFn f = parse_piecewise({{0, 1, "x"}, {1, 2, "x^2"}}, {});
    auto s = monotone_segments(f, f.domain(), 1e-3);
    REQUIRE(s.size() == 1);
    const RealFn g = parse("x^2", {}, Interval::closed(-10, 10));
    s = monotone_segments(g, g.domain(), default_grid_h(g.domain()));
    REQUIRE(s.size() == 2);
    CHECK(s[0].direction == Direction::Decreasing);
    CHECK(s[0].interval.hi == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("invert_on_segment examples") {
    const RealFn q1 = parse("x + 2", {}, Interval::closed(0, 1));
    auto s = monotone_segments(q1, unit01, 1e-3);
    CHECK(invert_on_segment(q1, s[0], 2.5) == doctest::Approx(0.5).epsilon(1e-12));

    const RealFn sq = parse("x^2", {}, Interval::closed(0, 2));
    s = monotone_segments(sq, IntervalSet(Interval::closed(0, 2)), 1e-3);
    CHECK(invert_on_segment(sq, s[0], 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    const RealFn q2 = parse("2 - x + 12*x^2 - 12*x^3", {}, Interval::closed(0, 1));
    s = monotone_segments(q2, unit01, default_grid_h(unit01));
    CHECK(invert_on_segment(q2, s.back(), 1.0) == doctest::Approx(1.0).epsilon(1e-10));

    CHECK_THROWS_AS(invert_on_segment(q1, monotone_segments(q1, unit01, 1e-3)[0], 7.0), NumericalError);
  }

  TEST_CASE("property: inversion round trip") {
    std::mt19937_64 rng(11);
    const RealFn fns[] = {
        parse("2 - x + 12*x^2 - 12*x^3", {}, Interval::closed(0, 1)),
        parse("x^3 - x", {}, Interval::closed(0, 1)),
        parse("exp(x) + x", {}, Interval::closed(0, 1)),
        parse("phi(3*x)", {}, Interval::closed(0, 1)),
    };
    for (const auto& f : fns) {
      for (const auto& seg : monotone_segments(f, unit01, default_grid_h(unit01))) {
        if (!seg.strict()) continue;
        std::uniform_real_distribution<double> u(seg.interval.lo, seg.interval.hi);
        for (int i = 0; i < 100; ++i) {
          const double x = u(rng);
          CHECK(std::fabs(invert_on_segment(f, seg, f(x)) - x) <= 1e-8);
          CHECK(std::fabs(f(invert_on_segment(f, seg, f(x))) - f(x)) <= 1e-10 * std::max(1.0, std::fabs(f(x))));
        }
      }
    }
  }
}
