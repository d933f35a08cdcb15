#include "salvage/adversary.hpp"

#include <algorithm>
#include <cmath>

#include "salvage/error.hpp"
#include "salvage/weights.hpp"

namespace salvage {

RealFn bump_g_prime(const BumpSpec& spec, const IntervalSet& X) {
  const Interval hull = X.hull();
  const double a = spec.center - spec.half_width;
  const double b = spec.center + spec.half_width;
  const Expr eps = Expr::number(spec.epsilon);
  const Expr u = (Expr::var() - Expr::number(spec.center)) / Expr::number(spec.half_width);
  const Expr bumped = eps + Expr::number(spec.amplitude) * Expr::call(Builtin::Bump, u);
  std::vector<RealFn::Piece> pieces;
  if (hull.lo < a) pieces.push_back({Interval{hull.lo, a, hull.lo_closed, false}, eps});
  pieces.push_back({Interval{std::max(a, hull.lo), std::min(b, hull.hi), a > hull.lo || hull.lo_closed,
                             b < hull.hi ? false : hull.hi_closed},
                    bumped});
  if (b < hull.hi) pieces.push_back({Interval{b, hull.hi, true, hull.hi_closed}, eps});
  return RealFn(std::move(pieces));
}

AdversaryResult find_sign_flip(const RealFn& omega, const SignPartition& part, double epsilon,
                               const QuadOptions& opts) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  const QuadratureResult total = integrate(omega, part.domain, opts);
  if (part.x_minus.measure() <= 0.0)
    return Infeasible{"w >= 0 on X, so every g' >= epsilon gives beta >= epsilon * int w", epsilon * total.value};

  const double r = opts.truncation_radius;
  Interval best;
  double best_mass = kInf;
  for (Interval iv : part.x_minus) {
    if (iv.measure() <= 0.0) continue;
    if (!std::isfinite(iv.lo)) iv.lo = std::min(-r, iv.hi - 1.0);
    if (!std::isfinite(iv.hi)) iv.hi = std::max(r, iv.lo + 1.0);
    const double m = integrate(omega, IntervalSet(iv), opts).value;
    if (m < best_mass) {
      best_mass = m;
      best = iv;
    }
  }

  BumpSpec spec;
  spec.center = best.mid();
  spec.half_width = 0.3 * best.measure();
  spec.epsilon = epsilon;
  const Interval support = Interval::closed(spec.center - spec.half_width, spec.center + spec.half_width);
  const double c = spec.center;
  const double hw = spec.half_width;
  const QuadratureResult wb =
      integrate([&](double x) { return omega(x) * bump_derivative((x - c) / hw, 0); }, support, opts);
  if (!(wb.value < 0.0)) throw NumericalError("int w*B is not negative on " + support.str());

  double m0 = -epsilon * total.value / wb.value;
  if (m0 <= 0.0) m0 = epsilon;
  spec.amplitude = 2.0 * m0;

  SignFlip out;
  out.bump = spec;
  out.g_prime = bump_g_prime(spec, part.domain);
  out.achieved_beta = beta(omega, out.g_prime, part.domain, opts).value;
  out.grid_min = kInf;
  for (double x : sample_grid(part.domain, 4096)) out.grid_min = std::min(out.grid_min, out.g_prime(x));
  out.omega_mass = total;
  out.omega_bump = wb;
  return out;
}

}  // namespace salvage
