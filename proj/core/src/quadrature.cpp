#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "salvage/error.hpp"
#include "salvage/numerics.hpp"

namespace salvage {

namespace {

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss
// weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

struct Segment {
  double a;
  double b;
  double value;
  double error;
  int depth;
};

struct ByError {
  bool operator()(const Segment& x, const Segment& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;  // deterministic tie-break
  }
};

Segment gauss_kronrod(const ScalarFn& f, double a, double b, int depth) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::fabs(hlgth);

  const double fc = f(centr);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::fabs(resk);
  std::array<double, 7> fv1{};
  std::array<double, 7> fv2{};
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = hlgth * kXgk[jtw];
    const double f1 = f(centr - absc);
    const double f2 = f(centr + absc);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[jtw] * (f1 + f2);
    resabs += kWgk[jtw] * (std::fabs(f1) + std::fabs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = hlgth * kXgk[jtwm1];
    const double f1 = f(centr - absc);
    const double f2 = f(centr + absc);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    resk += kWgk[jtwm1] * (f1 + f2);
    resabs += kWgk[jtwm1] * (std::fabs(f1) + std::fabs(f2));
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));

  const double result = resk * hlgth;
  resabs *= dhlgth;
  resasc *= dhlgth;
  double abserr = std::fabs((resk - resg) * hlgth);
  if (resasc != 0.0 && abserr != 0.0) abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  if (resabs > kTiny / (50.0 * kEps)) abserr = std::max(kEps * 50.0 * resabs, abserr);
  return {a, b, result, abserr, depth};
}

double interior_point(const Interval& iv) {
  if (iv.finite()) return iv.mid();
  if (std::isfinite(iv.lo)) return iv.lo + 1.0;
  if (std::isfinite(iv.hi)) return iv.hi - 1.0;
  return 0.0;
}

}  // namespace

QuadratureResult integrate(const ScalarFn& f, const Interval& iv, const QuadOptions& opts) {
  if (iv.empty() || iv.is_point()) return {};
  double a = iv.lo;
  double b = iv.hi;
  double truncation_error = 0.0;
  const double r = opts.truncation_radius;
  if (!std::isfinite(a)) {
    a = std::min(-r, b);
    truncation_error += std::fabs(f(a));
  }
  if (!std::isfinite(b)) {
    b = std::max(r, a);
    truncation_error += std::fabs(f(b));
  }
  if (!(b > a)) return {0.0, truncation_error, 0};

  std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
  std::vector<Segment> frozen;
  Segment first = gauss_kronrod(f, a, b, 0);
  double value = first.value;
  double error = first.error;
  heap.push(first);
  int subdivisions = 1;

  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::fabs(value)); };

  while (error > target() && !heap.empty()) {
    Segment worst = heap.top();
    heap.pop();
    if (worst.depth >= opts.max_depth) {
      frozen.push_back(worst);
      continue;
    }
    if (subdivisions >= opts.max_subdivisions) {
      heap.push(worst);
      break;
    }
    const double m = 0.5 * (worst.a + worst.b);
    Segment left = gauss_kronrod(f, worst.a, m, worst.depth + 1);
    Segment right = gauss_kronrod(f, m, worst.b, worst.depth + 1);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }

  // Re-sum in left-to-right order so the result does not depend on heap
  // bookkeeping.
  std::vector<Segment> all = std::move(frozen);
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  value = 0.0;
  error = 0.0;
  for (const auto& s : all) {
    value += s.value;
    error += s.error;
  }
  if (error > target())
    throw NumericalError("quadrature did not converge on " + iv.str() + ": error estimate " +
                         std::to_string(error) + " after " + std::to_string(subdivisions) + " subdivisions");
  return {value, error + truncation_error, subdivisions};
}

QuadratureResult integrate(const ScalarFn& f, const IntervalSet& s, const QuadOptions& opts) {
  QuadratureResult total;
  if (s.empty()) return total;
  QuadOptions share = opts;
  share.abs_tol = opts.abs_tol / static_cast<double>(s.size());
  for (const auto& iv : s) total += integrate(f, iv, share);
  return total;
}

std::vector<Interval> common_cells(const IntervalSet& s, const std::vector<const RealFn*>& fns) {
  std::vector<double> points;
  for (const RealFn* fn : fns) {
    const auto bp = fn->breakpoints();
    points.insert(points.end(), bp.begin(), bp.end());
    // Kinks of abs/sign are invisible to the Kronrod error estimate when
    // they sit close to a panel end, so cut there as well.
    for (const auto& piece : fn->pieces()) {
      const auto args = piece.expr.kink_arguments();
      if (args.empty()) continue;
      const IntervalSet part = s.intersect(IntervalSet(piece.interval));
      if (part.empty() || part.measure() == 0.0) continue;
      for (const Expr& u : args) {
        const auto roots = isolate_roots([&u](double x) { return u.eval(x); }, part, default_grid_h(part));
        points.insert(points.end(), roots.begin(), roots.end());
      }
    }
  }
  return s.split_at(points);
}

QuadratureResult integrate(const RealFn& f, const IntervalSet& s, const QuadOptions& opts) {
  QuadratureResult total;
  const auto cells = common_cells(s, {&f});
  if (cells.empty()) return total;
  QuadOptions share = opts;
  share.abs_tol = opts.abs_tol / static_cast<double>(cells.size());
  for (const auto& cell : cells) {
    if (cell.is_point()) continue;
    const int k = f.piece_index(interior_point(cell));
    if (k < 0) throw EvalError("integration set " + cell.str() + " outside domain " + f.domain().str());
    const Expr& e = f.pieces()[static_cast<std::size_t>(k)].expr;
    total += integrate([&e](double x) { return e.eval(x); }, cell, share);
  }
  return total;
}

QuadratureResult integrate_combination(const IntervalSet& s, const std::vector<const RealFn*>& fns,
                                       const std::function<double(const double*)>& combine,
                                       const QuadOptions& opts) {
  QuadratureResult total;
  const auto cells = common_cells(s, fns);
  if (cells.empty()) return total;
  QuadOptions share = opts;
  share.abs_tol = opts.abs_tol / static_cast<double>(cells.size());
  std::vector<const Expr*> exprs(fns.size());
  for (const auto& cell : cells) {
    if (cell.is_point()) continue;
    const double probe = interior_point(cell);
    for (std::size_t i = 0; i < fns.size(); ++i) {
      const int k = fns[i]->piece_index(probe);
      if (k < 0) throw EvalError("integration set " + cell.str() + " outside domain " + fns[i]->domain().str());
      exprs[i] = &fns[i]->pieces()[static_cast<std::size_t>(k)].expr;
    }
    total += integrate(
        [&](double x) {
          double vals[8];
          std::vector<double> heap;
          double* v = vals;
          if (exprs.size() > 8) {
            heap.resize(exprs.size());
            v = heap.data();
          }
          for (std::size_t i = 0; i < exprs.size(); ++i) v[i] = exprs[i]->eval(x);
          return combine(v);
        },
        cell, share);
  }
  return total;
}

QuadratureResult integrate(const RealFn& f, const IntervalSet& s, double tol) {
  QuadOptions opts;
  opts.abs_tol = tol;
  opts.rel_tol = 0.0;
  return integrate(f, s, opts);
}

}  // namespace salvage
