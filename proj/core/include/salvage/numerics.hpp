#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "salvage/interval.hpp"
#include "salvage/real_fn.hpp"

namespace salvage {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  /// Maximum bisection depth of any one subinterval.
  int max_depth = 60;
  /// Total subinterval budget per component interval.
  int max_subdivisions = 20000;
  /// Infinite ends are cut at +-truncation_radius.
  double truncation_radius = 10.0;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  int subdivisions = 0;

  QuadratureResult& operator+=(const QuadratureResult& o) {
    value += o.value;
    abs_error_estimate += o.abs_error_estimate;
    subdivisions += o.subdivisions;
    return *this;
  }
};

using ScalarFn = std::function<double(double)>;

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature of f over one
/// interval. Infinite ends are truncated at the configured radius and the
/// magnitude of f at each cut is added to the error estimate. Throws
/// NumericalError when the tolerance cannot be met within the budget.
QuadratureResult integrate(const ScalarFn& f, const Interval& iv, const QuadOptions& opts = {});

/// Sum over the components of `s` (left-to-right), each component
/// receiving an equal share of the absolute tolerance.
QuadratureResult integrate(const ScalarFn& f, const IntervalSet& s, const QuadOptions& opts = {});

/// Integrates a piecewise function over `s`, splitting at piece boundaries
/// so that each call sees a single smooth expression.
QuadratureResult integrate(const RealFn& f, const IntervalSet& s, const QuadOptions& opts = {});
QuadratureResult integrate(const RealFn& f, const IntervalSet& s, double tol);

/// Integrates combine(f_1(x), ..., f_k(x)) over `s`, splitting at every
/// breakpoint of the listed functions.
QuadratureResult integrate_combination(const IntervalSet& s, const std::vector<const RealFn*>& fns,
                                       const std::function<double(const double*)>& combine,
                                       const QuadOptions& opts = {});

/// Splits `s` at the breakpoints of every function listed, yielding cells
/// on which each function is given by a single expression. Sign changes of
/// abs/sign arguments are cut points too.
std::vector<Interval> common_cells(const IntervalSet& s, const std::vector<const RealFn*>& fns);

/// Roots at sign changes of f on a uniform grid of spacing `grid_h` over
/// each component of `s` (infinite ends truncated at `radius`). Each root
/// is bracketed and bisected to width 1e-12 and snapped to a nearby short
/// decimal when f vanishes there exactly. Sorted ascending. Tangential
/// roots that do not change sign are not reported.
std::vector<double> isolate_roots(const ScalarFn& f, const IntervalSet& s, double grid_h,
                                  double radius = 10.0);
std::vector<double> isolate_roots(const RealFn& f, const IntervalSet& s, double grid_h);

/// Default grid spacing: measure(s) / 4096 (finite part only).
double default_grid_h(const IntervalSet& s, double radius = 10.0);

enum class Direction { Increasing, Decreasing, Constant };

const char* to_string(Direction d);

struct MonotoneSegment {
  Interval interval;
  Direction direction = Direction::Constant;
  /// One-sided limits of f at the ends of `interval`.
  double value_lo = 0.0;
  double value_hi = 0.0;

  double min_value() const { return value_lo < value_hi ? value_lo : value_hi; }
  double max_value() const { return value_lo < value_hi ? value_hi : value_lo; }
  bool strict() const { return direction != Direction::Constant; }
};

/// Partitions `s` into maximal runs where f' keeps one sign (positive,
/// negative, or identically zero). Derivative sign changes are located on
/// the grid and refined by bisection; piece boundaries of f always split
/// unless f is continuous there and the direction carries across.
std::vector<MonotoneSegment> monotone_segments(const RealFn& f, const IntervalSet& s, double grid_h);

/// Solves f(x) = y on a strictly monotone segment by bisection.
/// Throws NumericalError when y lies outside the segment's range or the
/// segment is constant.
double invert_on_segment(const RealFn& f, const MonotoneSegment& seg, double y);

/// min and max of f over `s`, from segment end values.
std::pair<double, double> value_range(const std::vector<MonotoneSegment>& segments);

}  // namespace salvage
