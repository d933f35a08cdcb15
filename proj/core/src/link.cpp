#include "salvage/link.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "salvage/dominance.hpp"
#include "salvage/error.hpp"

namespace salvage {

namespace {

double grid_h_for(const IntervalSet& s, double requested) {
  return requested > 0.0 ? requested : default_grid_h(s);
}

Interval image_of(const MonotoneSegment& seg) {
  const Interval& iv = seg.interval;
  if (seg.direction == Direction::Decreasing) return Interval{seg.value_hi, seg.value_lo, iv.hi_closed, iv.lo_closed};
  if (seg.direction == Direction::Increasing) return Interval{seg.value_lo, seg.value_hi, iv.lo_closed, iv.hi_closed};
  return Interval::point(seg.value_lo);
}

bool passes_integral(const QuadratureResult& r, double tol) {
  return std::fabs(r.value) <= std::max(tol, 3.0 * r.abs_error_estimate);
}

}  // namespace

const char* to_string(LinkIssue::Kind k) {
  switch (k) {
    case LinkIssue::Kind::NotInjective:
      return "link not injective";
    case LinkIssue::Kind::ImageEscapes:
      return "link image escapes X+";
    case LinkIssue::Kind::PartialCoverage:
      return "partial coverage of X-";
  }
  return "?";
}

SignPartition partition_signs(const RealFn& omega, const IntervalSet& X, const RealFn* g_prime, double grid_h) {
  SignPartition part;
  part.domain = X;
  const double h = grid_h_for(X, grid_h);
  const auto roots = isolate_roots(omega, X, h);
  std::vector<double> cuts = roots;
  for (double b : omega.breakpoints()) cuts.push_back(b);

  std::vector<Interval> negative;
  for (Interval cell : X.split_at(cuts)) {
    if (cell.is_point()) continue;
    double probe = cell.mid();
    if (!cell.finite()) probe = std::isfinite(cell.lo) ? cell.lo + 1.0 : std::isfinite(cell.hi) ? cell.hi - 1.0 : 0.0;
    if (omega(probe) < 0.0) {
      // A root on the left edge has w = 0 and belongs to X+.
      if (std::binary_search(roots.begin(), roots.end(), cell.lo)) cell.lo_closed = false;
      negative.push_back(cell);
    }
  }
  part.x_minus = IntervalSet(std::move(negative));
  part.x_plus = X.subtract(part.x_minus);
  if (g_prime != nullptr) part.x_plus_matched = match_set(omega, *g_prime, part, h);
  return part;
}

bool LinkFn::valid() const {
  return std::none_of(issues.begin(), issues.end(), [](const LinkIssue& i) { return i.fatal(); });
}

bool ConditionReport::link_valid() const {
  return std::none_of(issues.begin(), issues.end(), [](const LinkIssue& i) { return i.fatal(); });
}

LinkFn make_link(const RealFn& q, const SignPartition& part, const LinkOptions& opts) {
  LinkFn link;
  link.q = q;
  link.q_prime = q.derivative();
  link.domain = part.x_minus;
  if (link.domain.empty()) return link;

  const double h = grid_h_for(part.x_minus, opts.grid_h);
  link.segments = monotone_segments(q, link.domain, h);

  // Injective iff every segment is strictly monotone and the segment
  // images overlap at most in single points.
  bool injective = std::all_of(link.segments.begin(), link.segments.end(),
                               [](const MonotoneSegment& s) { return s.strict(); });
  std::vector<double> witness;
  for (std::size_t i = 0; injective && i < link.segments.size(); ++i) {
    for (std::size_t j = i + 1; j < link.segments.size(); ++j) {
      const Interval overlap = intersect(image_of(link.segments[i]), image_of(link.segments[j]));
      if (overlap.measure() > 0.0) {
        injective = false;
        const double y = overlap.mid();
        witness = {invert_on_segment(q, link.segments[i], y), invert_on_segment(q, link.segments[j], y)};
        break;
      }
    }
  }
  if (!injective && witness.empty()) {
    for (const auto& s : link.segments)
      if (!s.strict()) witness = {s.interval.lo, s.interval.hi};
  }

  if (!injective) {
    std::ostringstream msg;
    msg << link.segments.size() << " monotone segments on X-:";
    for (const auto& s : link.segments) msg << ' ' << s.interval.str() << ' ' << to_string(s.direction) << ';';
    if (opts.branch) {
      if (*opts.branch >= link.segments.size())
        throw ConfigError("branch " + std::to_string(*opts.branch) + " does not exist; link has " +
                          std::to_string(link.segments.size()) + " monotone segments");
      const MonotoneSegment chosen = link.segments[*opts.branch];
      if (!chosen.strict()) throw ConfigError("selected branch is constant, not invertible");
      msg << " using branch " << *opts.branch << ' ' << chosen.interval.str()
          << "; X- outside this branch is not covered";
      link.domain = part.x_minus.intersect(IntervalSet(chosen.interval));
      link.segments = {chosen};
      link.issues.push_back({LinkIssue::Kind::PartialCoverage, msg.str(), {chosen.interval.lo, chosen.interval.hi}});
    } else {
      link.issues.push_back({LinkIssue::Kind::NotInjective, msg.str(), witness});
    }
  }

  std::vector<Interval> images;
  for (const auto& s : link.segments) images.push_back(image_of(s));
  link.image = IntervalSet(std::move(images));

  // Image must stay inside X+; report the point that lands farthest out.
  double worst = 0.0;
  double worst_x = 0.0;
  double worst_q = 0.0;
  for (double x : sample_grid(link.domain, opts.grid_points)) {
    const double y = q(x);
    if (part.x_plus.contains(y)) continue;
    const double d = part.x_plus.distance(y);
    if (d > 1e-12 * std::max(1.0, std::fabs(y)) && d > worst) {
      worst = d;
      worst_x = x;
      worst_q = y;
    }
  }
  if (worst > 0.0) {
    std::ostringstream msg;
    msg << "Q(" << worst_x << ") = " << worst_q << " lies outside X+ = " << part.x_plus.str()
        << " (distance " << worst << ")";
    link.issues.push_back({LinkIssue::Kind::ImageEscapes, msg.str(), {worst_x}});
  }
  return link;
}

ConditionReport check_link(const RealFn& omega, const RealFn& g_prime, const LinkFn& link,
                           const SignPartition& part, const LinkOptions& opts) {
  (void)part;
  ConditionReport rep;
  rep.issues = link.issues;
  const auto grid = sample_grid(link.domain, opts.grid_points);

  double a1 = 0.0;
  double a2 = grid.empty() ? 0.0 : kInf;
  for (double x : grid) {
    const double y = link.q(x);
    const bool in_g = g_prime.contains(y);
    const bool in_w = omega.contains(y);
    if (!in_g || !in_w) ++rep.skipped_points;
    if (in_g) a1 = std::max(a1, std::fabs(g_prime(x) - g_prime(y)));
    if (in_w) {
      const double v = omega(x) + omega(y);
      if (v < a2) {
        a2 = v;
        rep.a2_argmin = x;
      }
    }
  }
  if (!std::isfinite(a2)) a2 = 0.0;
  rep.a1_sup_residual = a1;
  rep.a2_min = a2;

  const std::vector<const RealFn*> fns{&omega, &link.q_prime, &g_prime};
  rep.a3_integral = integrate_combination(
      link.domain, fns, [](const double* v) { return v[0] * (1.0 - v[1]) * v[2]; }, opts.quad);
  rep.a4_integral = integrate_combination(
      link.domain, fns, [](const double* v) { return v[0] * (1.0 - v[1]); }, opts.quad);
  rep.a3_abs_jacobian = integrate_combination(
      link.domain, fns, [](const double* v) { return v[0] * (1.0 - std::fabs(v[1])) * v[2]; }, opts.quad);
  rep.a4_abs_jacobian = integrate_combination(
      link.domain, fns, [](const double* v) { return v[0] * (1.0 - std::fabs(v[1])); }, opts.quad);

  rep.verdicts.a1 = rep.a1_sup_residual <= opts.tol_a1;
  rep.verdicts.a2 = rep.a2_min >= -opts.tol_a2;
  rep.verdicts.a3 = passes_integral(rep.a3_integral, opts.tol_integral);
  rep.verdicts.a4 = passes_integral(rep.a4_integral, opts.tol_integral);
  return rep;
}

PiecewiseWeight transform_weights_link(const RealFn& omega, const LinkFn& link, const SignPartition& part) {
  if (!link.valid()) {
    std::string msg = "cannot build transformed weights:";
    for (const auto& i : link.issues)
      if (i.fatal()) msg += std::string(" ") + to_string(i.kind) + " (" + i.message + ")";
    throw LinkError(msg);
  }
  std::vector<PiecewiseWeight::Piece> pieces;
  for (const auto& seg : link.segments) {
    const IntervalSet img = IntervalSet(image_of(seg)).intersect(part.x_plus);
    for (const auto& iv : img) {
      const RealFn q = link.q;
      const RealFn w = omega;
      pieces.push_back({iv,
                        [q, w, seg](double x) { return w(invert_on_segment(q, seg, x)) + w(x); },
                        "w(Qinv(x)) + w(x)"});
    }
  }
  for (const auto& iv : part.x_plus.subtract(link.image))
    pieces.push_back(PiecewiseWeight::function_piece(iv, omega, "w(x)"));
  for (const auto& iv : part.x_minus) pieces.push_back(PiecewiseWeight::constant_piece(iv, 0.0, "0"));

  PiecewiseWeight out(std::move(pieces));
  out.nonneg_certificate = out.min_on_support(4096);
  return out;
}

Prop1Check verify_prop1(const RealFn& omega, const PiecewiseWeight& omega_tilde, const RealFn& g_prime,
                        const IntervalSet& X, const SignPartition& part, const QuadOptions& opts) {
  Prop1Check out;
  const IntervalSet rest = X.subtract(part.x_minus);
  out.beta_original = beta(omega, g_prime, X, opts);
  out.beta_transformed = beta(omega_tilde, g_prime, rest, opts);
  out.mass_original = integrate(omega, X, opts);
  out.mass_transformed = mass(omega_tilde, rest, opts);
  out.resid_stmt1 = std::fabs(out.beta_original.value - out.beta_transformed.value);
  out.resid_stmt2 = std::fabs(out.mass_original.value - out.mass_transformed.value);
  return out;
}

}  // namespace salvage
