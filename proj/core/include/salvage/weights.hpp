#pragma once

#include <string>
#include <vector>

#include "salvage/numerics.hpp"
#include "salvage/real_fn.hpp"

namespace salvage {

/// Transformed weight function: an ordered list of disjoint pieces, each
/// with its own evaluator. Zero outside every piece.
class PiecewiseWeight {
 public:
  struct Piece {
    Interval interval;
    ScalarFn fn;
    std::string label;
    /// Set when `fn` is a known constant; lets integration skip sampling.
    bool is_constant = false;
    double constant = 0.0;
  };

  PiecewiseWeight() = default;
  explicit PiecewiseWeight(std::vector<Piece> pieces);

  /// Wraps an expression-backed function piece by piece.
  static PiecewiseWeight from(const RealFn& f);

  static Piece constant_piece(Interval iv, double value, std::string label);
  static Piece function_piece(Interval iv, const RealFn& f, std::string label);

  double operator()(double x) const;

  const std::vector<Piece>& pieces() const { return pieces_; }
  /// Union of pieces that are not identically zero.
  const IntervalSet& support() const { return support_; }
  /// Union of all piece intervals.
  const IntervalSet& domain() const { return domain_; }

  /// Minimum over `points` samples spread across the support (+inf when
  /// the support is empty). Stored by the producers as a certificate.
  double min_on_support(std::size_t points = 4096) const;

  double nonneg_certificate = kInf;

 private:
  std::vector<Piece> pieces_;
  IntervalSet support_;
  IntervalSet domain_;
};

/// Integral of w * g_prime over `s` (the weighted-average estimand).
QuadratureResult beta(const PiecewiseWeight& w, const RealFn& g_prime, const IntervalSet& s,
                      const QuadOptions& opts = {});
QuadratureResult beta(const RealFn& w, const RealFn& g_prime, const IntervalSet& s,
                      const QuadOptions& opts = {});

/// Integral of w over `s`.
QuadratureResult mass(const PiecewiseWeight& w, const IntervalSet& s, const QuadOptions& opts = {});

}  // namespace salvage
