#include "salvage/real_fn.hpp"

#include <algorithm>
#include <cmath>

#include "salvage/error.hpp"

namespace salvage {

RealFn::RealFn(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  std::erase_if(pieces_, [](const Piece& p) { return p.interval.empty(); });
  std::sort(pieces_.begin(), pieces_.end(),
            [](const Piece& a, const Piece& b) { return a.interval.lo < b.interval.lo; });
  std::vector<Interval> ivs;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    if (k > 0) {
      const Interval& prev = pieces_[k - 1].interval;
      const Interval& cur = pieces_[k].interval;
      if (!intersect(prev, cur).empty())
        throw ConfigError("overlapping piece intervals " + prev.str() + " and " + cur.str());
    }
    ivs.push_back(pieces_[k].interval);
  }
  domain_ = IntervalSet(std::move(ivs));
}

RealFn RealFn::single(Expr expr, Interval domain) { return RealFn({Piece{domain, std::move(expr)}}); }

int RealFn::piece_index(double x) const {
  // Pieces are sorted and disjoint: the candidate is the last piece whose
  // lower end is <= x.
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Piece& p) { return v < p.interval.lo; });
  while (it != pieces_.begin()) {
    --it;
    if (it->interval.contains(x)) return static_cast<int>(it - pieces_.begin());
    if (it->interval.hi < x) break;
  }
  return -1;
}

double RealFn::operator()(double x) const {
  const int k = piece_index(x);
  if (k < 0) throw EvalError("x = " + std::to_string(x) + " outside domain " + domain_.str());
  return pieces_[static_cast<std::size_t>(k)].expr.eval(x);
}

double RealFn::eval_left(double x) const {
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    const Interval& iv = it->interval;
    if (iv.lo < x && x <= iv.hi) return it->expr.eval(x);
  }
  return (*this)(x);
}

double RealFn::eval_right(double x) const {
  for (const auto& p : pieces_) {
    const Interval& iv = p.interval;
    if (iv.lo <= x && x < iv.hi) return p.expr.eval(x);
  }
  return (*this)(x);
}

std::vector<double> RealFn::breakpoints() const {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < pieces_.size(); ++k) {
    out.push_back(pieces_[k].interval.hi);
    if (pieces_[k + 1].interval.lo != pieces_[k].interval.hi) out.push_back(pieces_[k + 1].interval.lo);
  }
  return out;
}

RealFn RealFn::derivative() const {
  std::vector<Piece> out;
  out.reserve(pieces_.size());
  for (const auto& p : pieces_) out.push_back({p.interval, p.expr.derivative()});
  return RealFn(std::move(out));
}

RealFn RealFn::restricted_to(const IntervalSet& s) const {
  std::vector<Piece> out;
  for (const auto& p : pieces_) {
    for (const auto& iv : IntervalSet(p.interval).intersect(s)) out.push_back({iv, p.expr});
  }
  return RealFn(std::move(out));
}

std::string RealFn::str() const {
  if (pieces_.size() == 1) return pieces_.front().expr.str();
  std::string out;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    if (k) out += "; ";
    out += pieces_[k].expr.str() + " on " + pieces_[k].interval.str();
  }
  return out;
}

RealFn parse(std::string_view text, const ParamMap& params, Interval domain) {
  return RealFn::single(parse_expr(text, params), domain);
}

RealFn parse_piecewise(const std::vector<PieceText>& pieces, const ParamMap& params) {
  if (pieces.empty()) throw ConfigError("piecewise function has no pieces");
  std::vector<PieceText> sorted = pieces;
  std::sort(sorted.begin(), sorted.end(), [](const PieceText& a, const PieceText& b) { return a.lo < b.lo; });
  std::vector<RealFn::Piece> out;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto& p = sorted[k];
    if (!(p.lo < p.hi)) throw ConfigError("piece interval must satisfy lo < hi");
    if (k > 0 && p.lo < sorted[k - 1].hi)
      throw ConfigError("overlapping piece intervals at x = " + std::to_string(p.lo));
    const bool last = k + 1 == sorted.size();
    Interval iv{p.lo, p.hi, std::isfinite(p.lo), last && std::isfinite(p.hi)};
    out.push_back({iv, parse_expr(p.expr, params)});
  }
  return RealFn(std::move(out));
}

}  // namespace salvage
