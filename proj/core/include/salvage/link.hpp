#pragma once

#include <optional>
#include <string>
#include <vector>

#include "salvage/numerics.hpp"
#include "salvage/real_fn.hpp"
#include "salvage/weights.hpp"

namespace salvage {

/// Sign regions of a weight function over its domain X.
///
/// x_minus = {w < 0}; x_plus = {w >= 0} (zeros of w belong to x_plus);
/// x_plus_matched = points of x_plus whose g' value is also attained on
/// x_minus (empty when no g' was supplied).
struct SignPartition {
  IntervalSet domain;
  IntervalSet x_minus;
  IntervalSet x_plus;
  IntervalSet x_plus_matched;
};

/// Splits X by the sign of `omega` using root isolation on a grid of
/// spacing `grid_h` (0 selects measure(X)/4096). When `g_prime` is given,
/// the matched set is filled in as well.
SignPartition partition_signs(const RealFn& omega, const IntervalSet& X, const RealFn* g_prime = nullptr,
                              double grid_h = 0.0);

struct LinkOptions {
  /// Grid size for the pointwise conditions and the image check.
  std::size_t grid_points = 1024;
  double tol_a1 = 1e-10;
  double tol_a2 = 1e-10;
  /// Tolerance for the two integral conditions.
  double tol_integral = 1e-10;
  QuadOptions quad{};
  /// Selects one monotone branch of a non-injective link (0-based).
  std::optional<std::size_t> branch;
  /// Root/segment grid spacing; 0 selects measure/4096.
  double grid_h = 0.0;
};

struct LinkIssue {
  enum class Kind { NotInjective, ImageEscapes, PartialCoverage };
  Kind kind;
  std::string message;
  /// Points in X- where the problem shows (a pair for non-injectivity).
  std::vector<double> witness;

  /// PartialCoverage is a warning; the other kinds make the link unusable.
  bool fatal() const { return kind != Kind::PartialCoverage; }
};

const char* to_string(LinkIssue::Kind k);

/// A link function restricted to (a branch of) X-, with its monotone
/// structure and image.
struct LinkFn {
  RealFn q;
  RealFn q_prime;
  /// The part of X- the link is applied to (all of X- unless a branch was
  /// selected).
  IntervalSet domain;
  std::vector<MonotoneSegment> segments;
  /// Q(domain).
  IntervalSet image;
  std::vector<LinkIssue> issues;

  bool valid() const;
};

/// Builds the link from Q and the sign partition. Never throws for a
/// non-injective or escaping link; those are recorded in `issues`.
/// Throws ConfigError when the selected branch does not exist.
LinkFn make_link(const RealFn& q, const SignPartition& part, const LinkOptions& opts = {});

struct ConditionVerdicts {
  bool a1 = false;
  bool a2 = false;
  bool a3 = false;
  bool a4 = false;
};

struct ConditionReport {
  /// sup over the grid of |g'(x) - g'(Q(x))|.
  double a1_sup_residual = 0.0;
  /// min over the grid of w(x) + w(Q(x)), and where it is attained.
  double a2_min = 0.0;
  double a2_argmin = 0.0;
  /// Integral over X- of w(x)(1 - Q'(x))g'(x).
  QuadratureResult a3_integral;
  /// Integral over X- of w(x)(1 - Q'(x)).
  QuadratureResult a4_integral;
  /// Same integrals with |Q'| (the change-of-variables Jacobian); they
  /// differ from the above only where Q is decreasing.
  QuadratureResult a3_abs_jacobian;
  QuadratureResult a4_abs_jacobian;
  ConditionVerdicts verdicts;
  /// Grid points where Q(x) fell outside the domain of w or g' and the
  /// pointwise conditions could not be evaluated.
  std::size_t skipped_points = 0;
  std::vector<LinkIssue> issues;

  bool link_valid() const;
};

/// Evaluates the four link conditions: the pointwise ones on a grid over
/// the link domain, the integral ones by quadrature. An integral condition
/// passes when |value| <= max(tol, 3 * error estimate).
ConditionReport check_link(const RealFn& omega, const RealFn& g_prime, const LinkFn& link,
                           const SignPartition& part, const LinkOptions& opts = {});

/// w~(x) = w(Q^-1(x)) + w(x) on Q(X-), w(x) on X+ \ Q(X-), 0 on X-.
/// Throws LinkError when the link has fatal issues.
PiecewiseWeight transform_weights_link(const RealFn& omega, const LinkFn& link, const SignPartition& part);

struct Prop1Check {
  QuadratureResult beta_original;
  QuadratureResult beta_transformed;
  QuadratureResult mass_original;
  QuadratureResult mass_transformed;
  /// |int_X w g' - int_{X \ X-} w~ g'|
  double resid_stmt1 = 0.0;
  /// |int_X w - int_{X \ X-} w~|
  double resid_stmt2 = 0.0;
};

Prop1Check verify_prop1(const RealFn& omega, const PiecewiseWeight& omega_tilde, const RealFn& g_prime,
                        const IntervalSet& X, const SignPartition& part, const QuadOptions& opts = {});

}  // namespace salvage
