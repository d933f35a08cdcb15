#include "salvage/weights.hpp"

#include <algorithm>
#include <cmath>

#include "salvage/error.hpp"

namespace salvage {

PiecewiseWeight::PiecewiseWeight(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  std::erase_if(pieces_, [](const Piece& p) { return p.interval.empty(); });
  std::sort(pieces_.begin(), pieces_.end(), [](const Piece& a, const Piece& b) {
    if (a.interval.lo != b.interval.lo) return a.interval.lo < b.interval.lo;
    return a.interval.lo_closed && !b.interval.lo_closed;
  });
  std::vector<Interval> all;
  std::vector<Interval> nonzero;
  for (const auto& p : pieces_) {
    all.push_back(p.interval);
    if (!(p.is_constant && p.constant == 0.0)) nonzero.push_back(p.interval);
  }
  domain_ = IntervalSet(std::move(all));
  support_ = IntervalSet(std::move(nonzero));
}

PiecewiseWeight::Piece PiecewiseWeight::constant_piece(Interval iv, double value, std::string label) {
  return Piece{iv, [value](double) { return value; }, std::move(label), true, value};
}

PiecewiseWeight::Piece PiecewiseWeight::function_piece(Interval iv, const RealFn& f, std::string label) {
  return Piece{iv, [f](double x) { return f(x); }, std::move(label), false, 0.0};
}

PiecewiseWeight PiecewiseWeight::from(const RealFn& f) {
  std::vector<Piece> pieces;
  for (const auto& p : f.pieces()) {
    Expr e = p.expr;
    pieces.push_back(Piece{p.interval, [e](double x) { return e.eval(x); }, e.str(), e.is_number(),
                           e.is_number() ? e.value() : 0.0});
  }
  return PiecewiseWeight(std::move(pieces));
}

double PiecewiseWeight::operator()(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Piece& p) { return v < p.interval.lo; });
  while (it != pieces_.begin()) {
    --it;
    if (it->interval.contains(x)) return it->fn(x);
    if (it->interval.hi < x) break;
  }
  return 0.0;
}

double PiecewiseWeight::min_on_support(std::size_t points) const {
  double best = kInf;
  for (double x : sample_grid(support_, points)) best = std::min(best, (*this)(x));
  return best;
}

QuadratureResult beta(const PiecewiseWeight& w, const RealFn& g_prime, const IntervalSet& s,
                      const QuadOptions& opts) {
  // Cells: each weight piece intersected with s, split at g' breakpoints.
  struct Cell {
    Interval iv;
    const PiecewiseWeight::Piece* piece;
  };
  std::vector<Cell> cells;
  const auto g_breaks = g_prime.breakpoints();
  for (const auto& p : w.pieces()) {
    if (p.is_constant && p.constant == 0.0) continue;
    const IntervalSet part = IntervalSet(p.interval).intersect(s);
    for (const auto& iv : part.split_at(g_breaks))
      if (!iv.is_point()) cells.push_back({iv, &p});
  }
  QuadratureResult total;
  if (cells.empty()) return total;
  QuadOptions share = opts;
  share.abs_tol = opts.abs_tol / static_cast<double>(cells.size());
  for (const auto& c : cells) {
    const int k = g_prime.piece_index(c.iv.finite() ? c.iv.mid() : (std::isfinite(c.iv.lo) ? c.iv.lo + 1.0 : c.iv.hi - 1.0));
    if (k < 0) throw EvalError("g' undefined on " + c.iv.str());
    const Expr& ge = g_prime.pieces()[static_cast<std::size_t>(k)].expr;
    if (c.piece->is_constant) {
      const double v = c.piece->constant;
      QuadratureResult r = integrate([&ge](double x) { return ge.eval(x); }, c.iv, share);
      r.value *= v;
      r.abs_error_estimate *= std::fabs(v);
      total += r;
    } else {
      const ScalarFn& fn = c.piece->fn;
      total += integrate([&](double x) { return fn(x) * ge.eval(x); }, c.iv, share);
    }
  }
  return total;
}

QuadratureResult beta(const RealFn& w, const RealFn& g_prime, const IntervalSet& s, const QuadOptions& opts) {
  return beta(PiecewiseWeight::from(w), g_prime, s, opts);
}

QuadratureResult mass(const PiecewiseWeight& w, const IntervalSet& s, const QuadOptions& opts) {
  std::vector<std::pair<Interval, const PiecewiseWeight::Piece*>> cells;
  for (const auto& p : w.pieces()) {
    if (p.is_constant && p.constant == 0.0) continue;
    for (const auto& iv : IntervalSet(p.interval).intersect(s))
      if (!iv.is_point()) cells.emplace_back(iv, &p);
  }
  QuadratureResult total;
  if (cells.empty()) return total;
  QuadOptions share = opts;
  share.abs_tol = opts.abs_tol / static_cast<double>(cells.size());
  for (const auto& [iv, p] : cells) {
    if (p->is_constant) {
      total.value += p->constant * iv.measure();
      continue;
    }
    total += integrate(p->fn, iv, share);
  }
  return total;
}

}  // namespace salvage
