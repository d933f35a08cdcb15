#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "salvage/error.hpp"
#include "salvage/numerics.hpp"

namespace salvage {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

Interval truncated(const Interval& iv, double radius) {
  Interval out = iv;
  if (!std::isfinite(out.lo)) {
    out.lo = std::min(-radius, out.hi);
    out.lo_closed = true;
  }
  if (!std::isfinite(out.hi)) {
    out.hi = std::max(radius, out.lo);
    out.hi_closed = true;
  }
  return out;
}

// Grid over an interval; open ends are pulled inward by a hair so the
// sample stays inside.
std::vector<double> grid_points(const Interval& iv, double h) {
  const double len = iv.hi - iv.lo;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / h)));
  std::vector<double> xs(n + 1);
  for (std::size_t k = 0; k <= n; ++k) xs[k] = k == n ? iv.hi : iv.lo + len * static_cast<double>(k) / static_cast<double>(n);
  const double nudge = std::max(len * 1e-12, 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(iv.lo));
  if (!iv.lo_closed) xs.front() = std::min(iv.lo + nudge, iv.mid());
  const double nudge_hi = std::max(len * 1e-12, 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(iv.hi));
  if (!iv.hi_closed) xs.back() = std::max(iv.hi - nudge_hi, iv.mid());
  return xs;
}

double bisect_sign(const ScalarFn& f, double a, double b, int sign_a) {
  for (int it = 0; it < 200; ++it) {
    const double width = b - a;
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(a), std::fabs(b));
    if (width <= std::max(1e-12, floor)) break;
    const double m = a + 0.5 * width;
    if (m <= a || m >= b) break;
    const double fm = f(m);
    const int sm = sign_of(fm);
    if (sm == 0) return m;
    if (sm == sign_a)
      a = m;
    else
      b = m;
  }
  return a + 0.5 * (b - a);
}

// Prefers a short decimal near r when f vanishes there exactly.
double snap(const ScalarFn& f, double r) {
  const double slack = 2e-12 * std::max(1.0, std::fabs(r));
  for (double scale = 1.0; scale <= 1e9; scale *= 10.0) {
    const double c = std::round(r * scale) / scale;
    if (std::fabs(c - r) > slack) continue;
    try {
      if (f(c) == 0.0) return c;
    } catch (const EvalError&) {
    }
  }
  return r;
}

}  // namespace

double default_grid_h(const IntervalSet& s, double radius) {
  double m = 0.0;
  for (const auto& iv : s) m += truncated(iv, radius).measure();
  return m > 0.0 ? m / 4096.0 : 1.0;
}

std::vector<double> isolate_roots(const ScalarFn& f, const IntervalSet& s, double grid_h, double radius) {
  if (!(grid_h > 0.0)) throw NumericalError("grid spacing must be positive");
  std::vector<double> roots;
  for (const auto& raw : s) {
    if (raw.is_point()) continue;
    const Interval iv = truncated(raw, radius);
    if (!(iv.hi > iv.lo)) continue;
    const auto xs = grid_points(iv, grid_h);
    std::vector<int> sg(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) sg[k] = sign_of(f(xs[k]));

    std::optional<std::size_t> last;       // index of last nonzero sample
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::size_t zero_from = kNone;  // start of current run of exact zeros
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (sg[k] == 0) {
        if (zero_from == kNone) zero_from = k;
        continue;
      }
      if (last && sg[k] != sg[*last]) {
        if (zero_from != kNone) {
          const std::size_t mid = (zero_from + k - 1) / 2;
          roots.push_back(xs[mid]);
        } else {
          roots.push_back(snap(f, bisect_sign(f, xs[*last], xs[k], sg[*last])));
        }
      }
      last = k;
      zero_from = kNone;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<double> isolate_roots(const RealFn& f, const IntervalSet& s, double grid_h) {
  return isolate_roots([&f](double x) { return f(x); }, s, grid_h);
}

const char* to_string(Direction d) {
  switch (d) {
    case Direction::Increasing:
      return "increasing";
    case Direction::Decreasing:
      return "decreasing";
    case Direction::Constant:
      return "constant";
  }
  return "?";
}

namespace {

Direction direction_of(int s) {
  return s > 0 ? Direction::Increasing : s < 0 ? Direction::Decreasing : Direction::Constant;
}

double eval_near(const Expr& e, double x, double toward) {
  try {
    return e.eval(x);
  } catch (const EvalError&) {
    const double step = 1e-12 * std::max(1.0, std::fabs(x));
    return e.eval(x + (toward > x ? step : -step));
  }
}

struct Run {
  int cls;
  std::size_t first;
  std::size_t last;
};

// Monotone pieces of a single expression on one finite interval.
std::vector<MonotoneSegment> segments_on_cell(const Expr& e, const Interval& cell, double grid_h) {
  const Expr de = e.derivative();
  auto cls = [&de, &cell](double x) {
    return sign_of(eval_near(de, x, cell.mid()));
  };
  const auto xs = grid_points(cell, grid_h);
  std::vector<Run> runs;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const int c = cls(xs[k]);
    if (!runs.empty() && runs.back().cls == c)
      runs.back().last = k;
    else
      runs.push_back({c, k, k});
  }
  // A lone zero sample at either end belongs to its neighbour (x^2 at 0).
  if (runs.size() > 1 && runs.front().cls == 0 && runs.front().first == runs.front().last) {
    runs[1].first = runs.front().first;
    runs.erase(runs.begin());
  }
  if (runs.size() > 1 && runs.back().cls == 0 && runs.back().first == runs.back().last) {
    runs[runs.size() - 2].last = runs.back().last;
    runs.pop_back();
  }
  // A lone zero sample between nonzero runs is a critical point, not a
  // constant stretch.
  std::vector<Run> cleaned;
  std::vector<std::optional<double>> forced_boundary;  // per boundary after cleaned[i]
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Run& r = runs[i];
    const bool lone_zero = r.cls == 0 && r.first == r.last && i > 0 && i + 1 < runs.size();
    if (lone_zero) {
      if (runs[i - 1].cls == runs[i + 1].cls) {
        // inflection with exact zero derivative: same direction continues
        cleaned.back().last = r.last;
      } else {
        forced_boundary.back() = xs[r.first];
        cleaned.back().last = r.last;
      }
      continue;
    }
    if (!cleaned.empty() && cleaned.back().cls == r.cls) {
      cleaned.back().last = r.last;
      continue;
    }
    cleaned.push_back(r);
    forced_boundary.emplace_back();
  }

  std::vector<double> cuts;
  for (std::size_t i = 0; i + 1 < cleaned.size(); ++i) {
    if (forced_boundary[i]) {
      cuts.push_back(*forced_boundary[i]);
      continue;
    }
    // Refine the class change between the last sample of run i and the
    // first sample of run i+1.
    double a = xs[cleaned[i].last];
    double b = xs[cleaned[i + 1].first];
    const int ca = cleaned[i].cls;
    for (int it = 0; it < 200; ++it) {
      const double m = a + 0.5 * (b - a);
      if (m <= a || m >= b || b - a <= 1e-13 * std::max(1.0, std::fabs(a))) break;
      if (cls(m) == ca)
        a = m;
      else
        b = m;
    }
    cuts.push_back(a + 0.5 * (b - a));
  }

  std::vector<MonotoneSegment> out;
  double lo = cell.lo;
  bool lo_closed = cell.lo_closed;
  for (std::size_t i = 0; i < cleaned.size(); ++i) {
    const bool last = i + 1 == cleaned.size();
    Interval iv{lo, last ? cell.hi : cuts[i], lo_closed, last ? cell.hi_closed : false};
    if (!iv.empty() && !iv.is_point()) {
      MonotoneSegment seg;
      seg.interval = iv;
      seg.direction = direction_of(cleaned[i].cls);
      seg.value_lo = eval_near(e, iv.lo, iv.hi);
      seg.value_hi = eval_near(e, iv.hi, iv.lo);
      out.push_back(seg);
    }
    if (!last) {
      lo = cuts[i];
      lo_closed = true;
    }
  }
  return out;
}

}  // namespace

std::vector<MonotoneSegment> monotone_segments(const RealFn& f, const IntervalSet& s, double grid_h) {
  if (!(grid_h > 0.0)) throw NumericalError("grid spacing must be positive");
  std::vector<MonotoneSegment> out;
  for (const auto& raw : common_cells(s, {&f})) {
    if (raw.is_point()) continue;
    const Interval cell = truncated(raw, 10.0);
    if (!(cell.hi > cell.lo)) continue;
    const int k = f.piece_index(cell.mid());
    if (k < 0) throw EvalError("segment cell " + cell.str() + " outside domain " + f.domain().str());
    const Expr& e = f.pieces()[static_cast<std::size_t>(k)].expr;
    for (auto& seg : segments_on_cell(e, cell, grid_h)) {
      if (!out.empty()) {
        MonotoneSegment& prev = out.back();
        const double tol = 1e-12 * std::max(1.0, std::fabs(prev.value_hi));
        if (prev.interval.hi == seg.interval.lo && prev.direction == seg.direction &&
            std::fabs(prev.value_hi - seg.value_lo) <= tol) {
          prev.interval.hi = seg.interval.hi;
          prev.interval.hi_closed = seg.interval.hi_closed;
          prev.value_hi = seg.value_hi;
          continue;
        }
      }
      out.push_back(seg);
    }
  }
  return out;
}

double invert_on_segment(const RealFn& f, const MonotoneSegment& seg, double y) {
  if (!seg.strict()) throw NumericalError("cannot invert on a constant segment " + seg.interval.str());
  const double slack = 1e-12 * std::max(1.0, std::fabs(y));
  if (y < seg.min_value() - slack || y > seg.max_value() + slack)
    throw NumericalError("value " + std::to_string(y) + " outside segment range [" +
                         std::to_string(seg.min_value()) + ", " + std::to_string(seg.max_value()) + "]");
  if (y <= seg.min_value()) return seg.value_lo <= seg.value_hi ? seg.interval.lo : seg.interval.hi;
  if (y >= seg.max_value()) return seg.value_lo <= seg.value_hi ? seg.interval.hi : seg.interval.lo;

  const bool increasing = seg.value_hi > seg.value_lo;
  double a = seg.interval.lo;
  double b = seg.interval.hi;
  for (int it = 0; it < 200; ++it) {
    const double m = a + 0.5 * (b - a);
    if (m <= a || m >= b) break;
    const double fm = f(m) - y;
    if (fm == 0.0) return m;
    if ((fm > 0.0) == increasing)
      b = m;
    else
      a = m;
  }
  return a + 0.5 * (b - a);
}

std::pair<double, double> value_range(const std::vector<MonotoneSegment>& segments) {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& s : segments) {
    lo = std::min(lo, s.min_value());
    hi = std::max(hi, s.max_value());
  }
  return {lo, hi};
}

}  // namespace salvage
