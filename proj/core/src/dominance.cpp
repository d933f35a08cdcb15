#include "salvage/dominance.hpp"

#include <algorithm>
#include <cmath>

#include "salvage/error.hpp"

namespace salvage {

namespace {

double grid_h_for(const IntervalSet& s, double requested) {
  return requested > 0.0 ? requested : default_grid_h(s);
}

// Values taken by f on a segment, as an interval with matching closedness.
Interval value_interval(const MonotoneSegment& seg) {
  const Interval& iv = seg.interval;
  switch (seg.direction) {
    case Direction::Increasing:
      return Interval{seg.value_lo, seg.value_hi, iv.lo_closed, iv.hi_closed};
    case Direction::Decreasing:
      return Interval{seg.value_hi, seg.value_lo, iv.hi_closed, iv.lo_closed};
    case Direction::Constant:
      break;
  }
  return Interval::point(seg.value_lo);
}

// Lebesgue measure of {x in seg : f(x) < y}.
double below(const RealFn& f, const MonotoneSegment& seg, double y) {
  const double len = seg.interval.measure();
  switch (seg.direction) {
    case Direction::Constant:
      return seg.value_lo < y ? len : 0.0;
    case Direction::Increasing:
      if (y <= seg.value_lo) return 0.0;
      if (y >= seg.value_hi) return len;
      return invert_on_segment(f, seg, y) - seg.interval.lo;
    case Direction::Decreasing:
      if (y <= seg.value_hi) return 0.0;
      if (y >= seg.value_lo) return len;
      return seg.interval.hi - invert_on_segment(f, seg, y);
  }
  return 0.0;
}

std::vector<double> dedupe(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (!out.empty() && x - out.back() <= tol) continue;
    out.push_back(x);
  }
  return out;
}

}  // namespace

const char* to_string(BinScheme s) { return s == BinScheme::EqualMass ? "equal-mass" : "equal-width"; }

Interval ValueBins::bin(std::size_t k) const {
  if (constant) return Interval::point(edges.front());
  const bool top = k + 2 == edges.size();
  return Interval{edges[k], edges[k + 1], true, top};
}

Interval preimage(const RealFn& f, const MonotoneSegment& seg, const Interval& values) {
  if (seg.direction == Direction::Constant) {
    if (values.contains(seg.value_lo)) return seg.interval;
    return Interval::open(0.0, 0.0);
  }
  const Interval w = intersect(value_interval(seg), values);
  if (w.empty()) return Interval::open(0.0, 0.0);
  const Interval& iv = seg.interval;
  if (seg.direction == Direction::Increasing) {
    const double lo = w.lo == seg.value_lo ? iv.lo : invert_on_segment(f, seg, w.lo);
    const double hi = w.hi == seg.value_hi ? iv.hi : invert_on_segment(f, seg, w.hi);
    return Interval{lo, hi, w.lo_closed, w.hi_closed};
  }
  const double lo = w.hi == seg.value_lo ? iv.lo : invert_on_segment(f, seg, w.hi);
  const double hi = w.lo == seg.value_hi ? iv.hi : invert_on_segment(f, seg, w.lo);
  return Interval{lo, hi, w.hi_closed, w.lo_closed};
}

ValueBins bin_values(const RealFn& g_prime, const std::vector<MonotoneSegment>& segments, double total_length,
                     std::size_t n, BinScheme scheme) {
  ValueBins bins;
  if (segments.empty()) throw ConfigError("g' has no segments on X");
  const auto [ymin, ymax] = value_range(segments);
  const double range = ymax - ymin;
  if (range <= 1e-14 * std::max(1.0, std::fabs(ymin))) {
    bins.edges = {ymin, ymin};
    bins.constant = true;
    return bins;
  }
  if (n < 2) throw ConfigError("bin count must be at least 2");

  std::vector<double> edges{ymin, ymax};
  if (scheme == BinScheme::EqualWidth) {
    for (std::size_t k = 1; k < n; ++k) edges.push_back(ymin + range * static_cast<double>(k) / static_cast<double>(n));
  } else {
    auto cdf = [&](double y) {
      double m = 0.0;
      for (const auto& s : segments) m += below(g_prime, s, y);
      return m;
    };
    double lo_bracket = ymin;
    const bool single = segments.size() == 1 && segments.front().strict() && segments.front().interval.finite();
    for (std::size_t k = 1; k < n && single; ++k) {
      // quantiles are explicit when g' is monotone on all of X
      const MonotoneSegment& s = segments.front();
      const double t = total_length * static_cast<double>(k) / static_cast<double>(n);
      const double x = s.direction == Direction::Increasing ? s.interval.lo + t : s.interval.hi - t;
      edges.push_back(g_prime(x));
    }
    for (std::size_t k = 1; k < n && !single; ++k) {
      const double target = total_length * static_cast<double>(k) / static_cast<double>(n);
      double a = lo_bracket;
      double b = ymax;
      for (int it = 0; it < 200; ++it) {
        const double m = a + 0.5 * (b - a);
        if (m <= a || m >= b || b - a <= 1e-14 * range) break;
        if (cdf(m) >= target)
          b = m;
        else
          a = m;
      }
      const double y = a + 0.5 * (b - a);
      edges.push_back(y);
      lo_bracket = a;
    }
  }
  for (const auto& s : segments) {
    for (double v : {s.value_lo, s.value_hi})
      if (v > ymin && v < ymax) edges.push_back(v);
  }
  bins.edges = dedupe(std::move(edges), 1e-12 * range);
  bins.edges.back() = ymax;
  return bins;
}

ValueBins bin_values(const RealFn& g_prime, const IntervalSet& X, std::size_t n, BinScheme scheme, double grid_h) {
  const auto segments = monotone_segments(g_prime, X, grid_h_for(X, grid_h));
  return bin_values(g_prime, segments, X.measure(), n, scheme);
}

IntervalSet match_set(const RealFn& omega, const RealFn& g_prime, const SignPartition& part, double grid_h) {
  (void)omega;
  if (part.x_minus.empty() || part.x_plus.empty()) return {};
  const double h = grid_h_for(part.domain, grid_h);
  std::vector<Interval> values;
  for (const auto& s : monotone_segments(g_prime, part.x_minus, h)) values.push_back(value_interval(s));
  const IntervalSet attained(std::move(values));

  std::vector<Interval> matched;
  for (const auto& s : monotone_segments(g_prime, part.x_plus, h)) {
    for (const auto& v : attained) {
      const Interval p = preimage(g_prime, s, v);
      if (!p.empty()) matched.push_back(p);
    }
  }
  return IntervalSet(std::move(matched)).intersect(part.x_plus);
}

std::vector<BinMeasures> induced_measures(const RealFn& omega, const RealFn& g_prime,
                                          const std::vector<MonotoneSegment>& segments, const SignPartition& part,
                                          const ValueBins& bins, const DominanceOptions& opts) {
  const std::size_t nb = bins.count();
  std::vector<BinMeasures> out(nb);
  QuadOptions per_bin = opts.quad;
  per_bin.abs_tol = opts.quad.abs_tol / static_cast<double>(std::max<std::size_t>(nb, 1));
  for (std::size_t k = 0; k < nb; ++k) {
    const Interval values = bins.bin(k);
    std::vector<Interval> pre;
    for (const auto& s : segments) {
      const Interval p = preimage(g_prime, s, values);
      if (!p.empty()) pre.push_back(p);
    }
    const IntervalSet whole(std::move(pre));
    BinMeasures& m = out[k];
    m.preimage_minus = whole.intersect(part.x_minus);
    m.preimage_plus = whole.intersect(part.x_plus);
    const QuadratureResult neg = integrate(omega, m.preimage_minus, per_bin);
    const QuadratureResult pos = integrate(omega, m.preimage_plus, per_bin);
    m.mu_minus = -neg.value;
    m.mu_plus = pos.value;
    m.mu_minus_error = neg.abs_error_estimate;
    m.mu_plus_error = pos.abs_error_estimate;
    m.leb_plus = m.preimage_plus.measure();
  }
  return out;
}

std::vector<BinMeasures> induced_measures(const RealFn& omega, const RealFn& g_prime, const SignPartition& part,
                                          const ValueBins& bins, const DominanceOptions& opts) {
  const auto segments = monotone_segments(g_prime, part.domain, grid_h_for(part.domain, opts.grid_h));
  return induced_measures(omega, g_prime, segments, part, bins, opts);
}

DominanceVerdict check_dominance(const std::vector<BinMeasures>& measures, double tol) {
  DominanceVerdict v;
  for (std::size_t k = 0; k < measures.size(); ++k) {
    const auto& m = measures[k];
    const double slack = std::max(tol, 3.0 * (m.mu_minus_error + m.mu_plus_error));
    if (m.mu_minus - m.mu_plus > slack) v.violated_bins.push_back(k);
  }
  v.dominated = v.violated_bins.empty();
  return v;
}

namespace {

struct StepWeight {
  PiecewiseWeight weight;
  std::vector<std::optional<double>> bin_weight;
  IntervalSet matched;
};

StepWeight build_step_weight(const RealFn& omega, const SignPartition& part, const std::vector<BinMeasures>& measures,
                             double tol) {
  StepWeight out;
  std::vector<PiecewiseWeight::Piece> pieces;
  std::vector<Interval> covered;
  std::vector<Interval> matched;
  out.bin_weight.resize(measures.size());
  for (std::size_t k = 0; k < measures.size(); ++k) {
    const auto& m = measures[k];
    if (!m.matched()) continue;
    const double net = m.mu_plus - m.mu_minus;
    const double slack = std::max(tol, 3.0 * (m.mu_minus_error + m.mu_plus_error));
    if (m.leb_plus <= 0.0 || net < -slack)
      throw DominanceError("bin " + std::to_string(k) + " has negative net mass " + std::to_string(net) +
                           " (mu_minus " + std::to_string(m.mu_minus) + ", mu_plus " + std::to_string(m.mu_plus) +
                           ")");
    // Near-ties within the tolerance are clamped to zero weight.
    const double value = std::max(0.0, net) / m.leb_plus;
    out.bin_weight[k] = value;
    for (const auto& iv : m.preimage_plus) {
      pieces.push_back(PiecewiseWeight::constant_piece(iv, value, "bin " + std::to_string(k)));
      covered.push_back(iv);
      matched.push_back(iv);
    }
  }
  const IntervalSet rest = part.x_plus.subtract(IntervalSet(std::move(covered)));
  for (const auto& iv : rest) pieces.push_back(PiecewiseWeight::function_piece(iv, omega, "w(x)"));
  for (const auto& iv : part.x_minus) pieces.push_back(PiecewiseWeight::constant_piece(iv, 0.0, "0"));
  out.weight = PiecewiseWeight(std::move(pieces));
  out.weight.nonneg_certificate = out.weight.min_on_support(4096);
  out.matched = IntervalSet(std::move(matched));
  return out;
}

}  // namespace

PiecewiseWeight transform_weights_dominance(const RealFn& omega, const RealFn& g_prime, const SignPartition& part,
                                            const ValueBins& bins, const std::vector<BinMeasures>& measures,
                                            double tol) {
  (void)g_prime;
  (void)bins;
  return build_step_weight(omega, part, measures, tol).weight;
}

std::vector<DominanceReport> refine(const RealFn& omega, const RealFn& g_prime, const SignPartition& part,
                                    const std::vector<std::size_t>& n_schedule, const DominanceOptions& opts) {
  std::vector<DominanceReport> reports;
  const auto segments = monotone_segments(g_prime, part.domain, grid_h_for(part.domain, opts.grid_h));
  const QuadratureResult beta_orig = beta(omega, g_prime, part.domain, opts.quad);
  const QuadratureResult mass_orig = integrate(omega, part.domain, opts.quad);
  for (std::size_t n : n_schedule) {
    DominanceReport rep;
    rep.n_requested = n;
    rep.bins = bin_values(g_prime, segments, part.domain.measure(), n, opts.scheme);
    rep.measures = induced_measures(omega, g_prime, segments, part, rep.bins, opts);
    const DominanceVerdict verdict = check_dominance(rep.measures, opts.tol);
    rep.dominated = verdict.dominated;
    rep.violated_bins = verdict.violated_bins;
    rep.beta_original = beta_orig;
    rep.mass_original = mass_orig;
    if (rep.dominated) {
      StepWeight step = build_step_weight(omega, part, rep.measures, opts.tol);
      rep.bin_weight = std::move(step.bin_weight);
      rep.matched_set = std::move(step.matched);
      rep.beta_transformed = beta(step.weight, g_prime, part.domain, opts.quad);
      rep.mass_transformed = mass(step.weight, part.domain, opts.quad);
      rep.preservation_residual = std::fabs(beta_orig.value - rep.beta_transformed->value);
      rep.mass_residual = std::fabs(mass_orig.value - rep.mass_transformed->value);
      rep.omega_tilde_n = std::move(step.weight);
    } else {
      rep.bin_weight.resize(rep.measures.size());
      std::vector<Interval> matched;
      for (const auto& m : rep.measures)
        if (m.matched())
          for (const auto& iv : m.preimage_plus) matched.push_back(iv);
      rep.matched_set = IntervalSet(std::move(matched));
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace salvage
