#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "salvage/dominance.hpp"
#include "salvage/error.hpp"

using namespace salvage;

namespace {

struct Problem {
  Interval d;
  RealFn w;
  RealFn gp;
  SignPartition part;

  Problem(Interval dom, const char* w_text, RealFn g, ParamMap pm = {})
      : d(dom), w(parse(w_text, pm, dom)), gp(std::move(g)), part(partition_signs(w, IntervalSet(dom), &gp)) {}
};

Problem gaussian() {
  const Interval d = Interval::closed(-10, 10);
  return Problem(d, "(1 + z*x)*phi(x)", parse("x^2", {}, d), {{"z", 2.0}});
}

double total(const std::vector<BinMeasures>& ms) {
  double s = 0.0;
  for (const auto& m : ms) s += m.mu_plus - m.mu_minus;
  return s;
}

}  // namespace

TEST_SUITE("salvage_dominance") {
  TEST_CASE("bin_values examples") {
    const Interval d = Interval::closed(0, 2);
    auto b = bin_values(parse("x", {}, d), IntervalSet(d), 4);
    CHECK(b.edges == std::vector<double>{0, 0.5, 1, 1.5, 2});
    b = bin_values(parse("x", {}, d), IntervalSet(d), 4, BinScheme::EqualWidth);
    CHECK(b.edges == std::vector<double>{0, 0.5, 1, 1.5, 2});
    CHECK_FALSE(b.constant);

    b = bin_values(parse("2", {}, d), IntervalSet(d), 64);
    CHECK(b.constant);
    CHECK(b.count() == 1);
    CHECK(b.bin(0).is_point());

    const RealFn gp2 = parse_piecewise({{0, 1, "2 - x + 12*x^2 - 12*x^3"}, {1, 2, "x"}}, {});
    b = bin_values(gp2, gp2.domain(), 16);
    const double xmax = (24.0 + std::sqrt(432.0)) / 72.0;
    const double qmax = 2 - xmax + 12 * xmax * xmax - 12 * xmax * xmax * xmax;
    CHECK(b.edges.back() == doctest::Approx(qmax).epsilon(1e-12));
    CHECK(b.edges.front() == 1.0);
    // the interior local minimum of Q is a critical value and becomes an edge
    const double xmin = (24.0 - std::sqrt(432.0)) / 72.0;
    const double qmin = 2 - xmin + 12 * xmin * xmin - 12 * xmin * xmin * xmin;
    bool has_min = false;
    for (double e : b.edges) has_min = has_min || std::fabs(e - qmin) <= 1e-9;
    CHECK(has_min);

    CHECK_THROWS_AS(bin_values(parse("x", {}, d), IntervalSet(d), 1), ConfigError);
  }

  TEST_CASE("equal-mass bins have equal-length preimages") {
    const Interval d = Interval::closed(0, 3);
    const RealFn gp = parse("x^2", {}, d);
    const auto b = bin_values(gp, IntervalSet(d), 30);
    REQUIRE(b.count() == 30);
    for (std::size_t k = 0; k + 1 < b.edges.size(); ++k)
      CHECK(std::sqrt(b.edges[k + 1]) - std::sqrt(b.edges[k]) == doctest::Approx(0.1).epsilon(1e-9));
    for (std::size_t k = 1; k < b.edges.size(); ++k) CHECK(b.edges[k] > b.edges[k - 1]);
  }

  TEST_CASE("match_set examples") {
    const Problem g = gaussian();
    const IntervalSet m = match_set(g.w, g.gp, g.part);
    CHECK(m.measure() == doctest::Approx(9.5).epsilon(1e-12));
    CHECK(m.intervals().front().lo == doctest::Approx(0.5).epsilon(1e-12));

    const Interval d = Interval::closed(0, 3);
    const Problem inc(d, "x - 1", parse("x", {}, d));
    CHECK(match_set(inc.w, inc.gp, inc.part).measure() <= 1e-12);

    const Problem pos(d, "x + 1", parse("x", {}, d));
    CHECK(match_set(pos.w, pos.gp, pos.part).empty());
  }

  TEST_CASE("induced_measures examples") {
    const Interval d = Interval::closed(0, 3);
    const Problem c(d, "(x - 1)/1.5", parse("2", {}, d));
    auto bins = bin_values(c.gp, IntervalSet(d), 8);
    auto ms = induced_measures(c.w, c.gp, c.part, bins);
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].preimage_minus == c.part.x_minus);
    CHECK(ms[0].mu_minus == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(ms[0].mu_plus == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

    const Problem lin(d, "x - 1", parse("x", {}, d));
    bins = bin_values(lin.gp, IntervalSet(d), 6);
    ms = induced_measures(lin.w, lin.gp, lin.part, bins);
    CHECK(bins.bin(0).str() == "[0, 0.5)");
    CHECK(ms[0].preimage_minus.str() == "[0, 0.5)");
    CHECK(ms[0].preimage_plus.empty());
    CHECK(ms[0].mu_plus == 0.0);
    CHECK(ms[0].mu_minus == doctest::Approx(0.375).epsilon(1e-12));

    const Problem pos(d, "x + 1", parse("x^2", {}, d));
    for (const auto& m : induced_measures(pos.w, pos.gp, pos.part, bin_values(pos.gp, IntervalSet(d), 16)))
      CHECK(m.mu_minus == 0.0);
  }

  TEST_CASE("check_dominance examples") {
    const Problem g = gaussian();
    const auto bins = bin_values(g.gp, IntervalSet(g.d), 256);
    auto v = check_dominance(induced_measures(g.w, g.gp, g.part, bins), 1e-10);
    CHECK(v.dominated);
    CHECK(v.violated_bins.empty());

    const Interval d = Interval::closed(0, 3);
    const Problem lin(d, "x - 1", parse("x", {}, d));
    const auto lb = bin_values(lin.gp, IntervalSet(d), 64);
    v = check_dominance(induced_measures(lin.w, lin.gp, lin.part, lb), 1e-10);
    CHECK_FALSE(v.dominated);
    for (std::size_t k = 0; k < lb.count(); ++k) {
      const bool inside = lb.bin(k).hi <= 1.0;
      const bool flagged = std::find(v.violated_bins.begin(), v.violated_bins.end(), k) != v.violated_bins.end();
      if (inside) CHECK(flagged);
      if (lb.bin(k).lo >= 1.0) CHECK_FALSE(flagged);
    }

    const Problem pos(d, "x + 1", parse("x", {}, d));
    CHECK(check_dominance(induced_measures(pos.w, pos.gp, pos.part, bin_values(pos.gp, IntervalSet(d), 8)), 1e-10)
              .dominated);
  }

  TEST_CASE("near-ties within the quadrature error are not violations") {
    std::vector<BinMeasures> ms(2);
    ms[0].mu_minus = 1.0 + 5e-11;
    ms[0].mu_plus = 1.0;
    ms[1].mu_minus = 1.0 + 1e-8;
    ms[1].mu_plus = 1.0;
    ms[1].mu_minus_error = 1e-8;
    CHECK(check_dominance(ms, 1e-10).dominated);
    ms[1].mu_minus_error = 0.0;
    CHECK_FALSE(check_dominance(ms, 1e-10).dominated);
  }

  TEST_CASE("transform_weights_dominance examples") {
    const Interval d = Interval::closed(0, 3);
    const Problem c(d, "(x - 1)/1.5", parse("2", {}, d));
    const auto bins = bin_values(c.gp, IntervalSet(d), 8);
    const auto ms = induced_measures(c.w, c.gp, c.part, bins);
    const PiecewiseWeight wt = transform_weights_dominance(c.w, c.gp, c.part, bins, ms);
    for (double x : sample_grid(c.part.x_plus, 100)) CHECK(std::fabs(wt(x) - 0.5) <= 1e-12);
    for (double x : sample_grid(c.part.x_minus, 100)) CHECK(wt(x) == 0.0);

    const Problem pos(d, "x + 1", parse("x^2", {}, d));
    const auto pb = bin_values(pos.gp, IntervalSet(d), 16);
    const PiecewiseWeight same =
        transform_weights_dominance(pos.w, pos.gp, pos.part, pb, induced_measures(pos.w, pos.gp, pos.part, pb));
    for (double x : sample_grid(IntervalSet(d), 50)) CHECK(same(x) == pos.w(x));

    const Problem lin(d, "x - 1", parse("x", {}, d));
    const auto lb = bin_values(lin.gp, IntervalSet(d), 8);
    CHECK_THROWS_AS(
        transform_weights_dominance(lin.w, lin.gp, lin.part, lb, induced_measures(lin.w, lin.gp, lin.part, lb)),
        DominanceError);
  }

  TEST_CASE("refine on the gaussian converges to 2 phi") {
    const Problem g = gaussian();
    const auto reps = refine(g.w, g.gp, g.part, {64, 128, 256, 512, 1024});
    REQUIRE(reps.size() == 5);
    double prev_res = kInf;
    double prev_sup = kInf;
    for (const auto& r : reps) {
      REQUIRE(r.dominated);
      REQUIRE(r.omega_tilde_n);
      CHECK(*r.preservation_residual <= prev_res);
      prev_res = *r.preservation_residual;
      double sup = 0.0;
      for (int i = 0; i <= 480; ++i) {
        const double x = 0.6 + 2.4 * i / 480.0;
        sup = std::max(sup, std::fabs((*r.omega_tilde_n)(x) - 2 * oracle::phi(x)));
      }
      CHECK(sup < prev_sup);
      prev_sup = sup;
      CHECK(r.omega_tilde_n->min_on_support(4096) >= -1e-12);
      // unmatched middle keeps w
      for (double x : {-0.4, 0.0, 0.45}) CHECK((*r.omega_tilde_n)(x) == doctest::Approx(g.w(x)));
    }
    CHECK(*reps.back().preservation_residual <= 1e-4);
    CHECK(prev_sup <= 5e-3);
  }

  TEST_CASE("refine with constant g' is exact at every n") {
    const Interval d = Interval::closed(0, 3);
    const Problem c(d, "(x - 1)/1.5", parse("2", {}, d));
    for (const auto& r : refine(c.w, c.gp, c.part, {64, 128, 256})) {
      CHECK(r.dominated);
      CHECK(*r.preservation_residual <= 1e-10);
      CHECK(*r.mass_residual <= 1e-10);
    }
  }

  TEST_CASE("refine on the cubic example is violated at every n") {
    const Interval d = Interval::closed(0, 2);
    const Problem e(d, "x - 1", parse_piecewise({{0, 1, "2 - x + 12*x^2 - 12*x^3"}, {1, 2, "x"}}, {}));
    for (const auto& r : refine(e.w, e.gp, e.part, {64, 128, 256, 512, 1024})) {
      CHECK_FALSE(r.dominated);
      CHECK_FALSE(r.omega_tilde_n);
      // every bin above 2 is unmatched mass from X-
      for (std::size_t k = 0; k < r.bins.count(); ++k)
        if (r.bins.bin(k).lo >= 2.0 && r.measures[k].mu_minus > 1e-9)
          CHECK(std::find(r.violated_bins.begin(), r.violated_bins.end(), k) != r.violated_bins.end());
    }
  }

  TEST_CASE("property: per-bin identity sums to the total mass") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.3, 2.7);
    std::uniform_int_distribution<int> nb(2, 200);
    const Interval d = Interval::closed(0, 3);
    const IntervalSet X(d);
    const char* gps[] = {"x", "x^2", "(x - 1.5)^2", "exp(-x) + 0.3*x", "2 - x + 12*x^2 - 12*x^3"};
    for (int trial = 0; trial < 30; ++trial) {
      const ParamMap pm{{"c", u(rng)}};
      const RealFn w = parse("(x - c)*(1 + x)", pm, d);
      const RealFn gp = parse(gps[trial % 5], {}, d);
      const auto part = partition_signs(w, X, &gp);
      const auto bins = bin_values(gp, X, static_cast<std::size_t>(nb(rng)));
      const auto ms = induced_measures(w, gp, part, bins);
      const double mass = integrate(w, X, 1e-12).value;
      CHECK(std::fabs(total(ms) - mass) <= 3e-10);
      double leb = 0.0;
      for (const auto& m : ms) {
        CHECK(m.mu_minus >= -1e-12);
        CHECK(m.mu_plus >= -1e-12);
        leb += m.preimage_minus.measure() + m.leb_plus;
      }
      CHECK(leb == doctest::Approx(3.0).epsilon(1e-12));
    }
  }

  TEST_CASE("property: dominated step weights are nonnegative and vanish on X-") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    const Interval d = Interval::closed(-4, 4);
    for (int trial = 0; trial < 10; ++trial) {
      const ParamMap pm{{"z", u(rng)}};
      const RealFn w = parse("(1 + z*x)*phi(x)", pm, d);
      const RealFn gp = parse("x^2", {}, d);
      const auto part = partition_signs(w, IntervalSet(d), &gp);
      const auto reps = refine(w, gp, part, {32, 128});
      for (const auto& r : reps) {
        REQUIRE(r.dominated);
        CHECK(r.omega_tilde_n->min_on_support(4096) >= -1e-12);
        for (double x : sample_grid(part.x_minus, 200)) CHECK((*r.omega_tilde_n)(x) == 0.0);
        CHECK(*r.mass_residual <= 1e-8);
      }
    }
  }

  TEST_CASE("oracle: per-bin masses match a brute-force Riemann sum") {
    struct Case {
      const char* name;
      Interval d;
      const char* w;
      RealFn gp;
      std::size_t n;
      BinScheme scheme;
    };
    const Interval d3 = Interval::closed(0, 3);
    const Interval d2 = Interval::closed(0, 2);
    const Interval dg = Interval::closed(-10, 10);
    const std::vector<Case> cases{
        {"linear", d3, "x - 1", parse("x", {}, d3), 64, BinScheme::EqualMass},
        {"constant", d3, "(x - 1)/1.5", parse("2", {}, d3), 64, BinScheme::EqualMass},
        {"cubic", d2, "x - 1", parse_piecewise({{0, 1, "2 - x + 12*x^2 - 12*x^3"}, {1, 2, "x"}}, {}), 64,
         BinScheme::EqualMass},
        {"gaussian", dg, "(1 + 2*x)*phi(x)", parse("x^2", {}, dg), 64, BinScheme::EqualMass},
        {"gaussian-width", dg, "(1 + 2*x)*phi(x)", parse("x^2", {}, dg), 64, BinScheme::EqualWidth},
    };
    for (const auto& c : cases) {
      CAPTURE(c.name);
      const RealFn w = parse(c.w, {}, c.d);
      const auto part = partition_signs(w, IntervalSet(c.d), &c.gp);
      const auto bins = bin_values(c.gp, IntervalSet(c.d), c.n, c.scheme);
      const auto ms = induced_measures(w, c.gp, part, bins);
      std::vector<double> edges = bins.edges;
      if (bins.constant) edges = {bins.edges[0] - 1, bins.edges[0] + 1};
      const auto ref = oracle::riemann_bins([&](double x) { return w(x); }, [&](double x) { return c.gp(x); }, edges,
                                            c.d.lo, c.d.hi, 1000000);
      for (std::size_t k = 0; k < ms.size(); ++k) {
        CAPTURE(k);
        CHECK(std::fabs(ms[k].mu_minus - ref.mu_minus[k]) <= 1e-6);
        CHECK(std::fabs(ms[k].mu_plus - ref.mu_plus[k]) <= 1e-6);
      }
    }
  }
}
