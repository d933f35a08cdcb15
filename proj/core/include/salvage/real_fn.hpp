#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "salvage/expr.hpp"
#include "salvage/interval.hpp"

namespace salvage {

/// Piecewise scalar function of one real variable.
///
/// Pieces are sorted and pairwise disjoint; the domain is their union.
/// Pieces built from a breakpoint list are closed on the left and open on
/// the right, except the last piece, which is closed on the right.
class RealFn {
 public:
  struct Piece {
    Interval interval;
    Expr expr;
  };

  RealFn() = default;
  /// Throws ConfigError when pieces overlap.
  explicit RealFn(std::vector<Piece> pieces);

  static RealFn single(Expr expr, Interval domain);

  /// Evaluates at x. Throws EvalError outside the domain.
  double operator()(double x) const;
  /// Limit from the left (uses the piece whose closure contains x from below).
  double eval_left(double x) const;
  /// Limit from the right.
  double eval_right(double x) const;

  const std::vector<Piece>& pieces() const { return pieces_; }
  const IntervalSet& domain() const { return domain_; }
  bool contains(double x) const { return domain_.contains(x); }

  /// Interior piece boundaries (where the defining expression may change).
  std::vector<double> breakpoints() const;

  /// Piece-by-piece exact derivative; boundaries unchanged.
  RealFn derivative() const;

  /// Same pieces, each interval intersected with `s`; empty pieces dropped.
  RealFn restricted_to(const IntervalSet& s) const;

  /// Index of the piece containing x, or -1.
  int piece_index(double x) const;

  std::string str() const;

 private:
  std::vector<Piece> pieces_;
  IntervalSet domain_;
};

/// Single-piece function of `text` on `domain`.
RealFn parse(std::string_view text, const ParamMap& params, Interval domain);

struct PieceText {
  double lo;
  double hi;
  std::string expr;
};

/// Piecewise function from breakpoint-ordered pieces, applying the
/// left-closed / right-open convention (last piece closed on the right).
RealFn parse_piecewise(const std::vector<PieceText>& pieces, const ParamMap& params);

}  // namespace salvage
