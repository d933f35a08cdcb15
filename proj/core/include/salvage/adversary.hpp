#pragma once

#include <string>
#include <variant>

#include "salvage/link.hpp"
#include "salvage/numerics.hpp"
#include "salvage/real_fn.hpp"

namespace salvage {

/// g'(x) = epsilon + amplitude * B((x - center) / half_width), with B the
/// smooth compact bump exp(-1/(1-u^2)) on (-1, 1).
struct BumpSpec {
  double center = 0.0;
  double half_width = 0.0;
  double epsilon = 0.0;
  double amplitude = 0.0;
};

struct SignFlip {
  BumpSpec bump;
  RealFn g_prime;
  double achieved_beta = 0.0;
  /// min of g' over a 4096-point grid on X
  double grid_min = 0.0;
  QuadratureResult omega_mass;
  QuadratureResult omega_bump;
};

struct Infeasible {
  std::string reason;
  /// beta >= epsilon * int w for every g' >= epsilon
  double beta_lower_bound = 0.0;
};

using AdversaryResult = std::variant<SignFlip, Infeasible>;

/// Builds the bump-shaped g' as a piecewise function over the hull of X.
RealFn bump_g_prime(const BumpSpec& spec, const IntervalSet& X);

/// Puts a bump in the middle 60% of the X- component with the most negative
/// mass and picks the amplitude (twice the break-even value) so that
/// beta < 0. Infeasible when X- has measure zero.
AdversaryResult find_sign_flip(const RealFn& omega, const SignPartition& part, double epsilon = 0.01,
                               const QuadOptions& opts = {});

}  // namespace salvage
