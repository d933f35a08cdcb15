#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "salvage/link.hpp"
#include "salvage/numerics.hpp"
#include "salvage/real_fn.hpp"
#include "salvage/weights.hpp"

namespace salvage {

/// How bin edges are placed over the attained range of g'.
enum class BinScheme {
  /// Quantiles of g'(x) under Lebesgue measure on X: every bin's preimage
  /// has the same total length. Default.
  EqualMass,
  /// Equal-width bins in value space.
  EqualWidth,
};

const char* to_string(BinScheme s);

/// Partition of the attained range of g' into value bins
/// [e_0, e_1), ..., [e_{n-1}, e_n] (top bin closed). A constant g' gives a
/// single zero-width bin [c, c] with `constant` set.
struct ValueBins {
  std::vector<double> edges;
  bool constant = false;

  std::size_t count() const { return edges.size() < 2 ? 0 : edges.size() - 1; }
  /// Value interval of bin k.
  Interval bin(std::size_t k) const;
};

/// Preimage of a value interval under f restricted to one monotone segment.
Interval preimage(const RealFn& f, const MonotoneSegment& seg, const Interval& values);

/// Bins over the range of g' on X. `n` edges intervals are placed by the
/// scheme, then every critical value of g' (segment end values strictly
/// inside the range) is added as an extra edge. Throws ConfigError for
/// n < 2 (unless g' is constant).
ValueBins bin_values(const RealFn& g_prime, const IntervalSet& X, std::size_t n,
                     BinScheme scheme = BinScheme::EqualMass, double grid_h = 0.0);
ValueBins bin_values(const RealFn& g_prime, const std::vector<MonotoneSegment>& segments, double total_length,
                     std::size_t n, BinScheme scheme);

struct BinMeasures {
  IntervalSet preimage_minus;
  IntervalSet preimage_plus;
  /// -int w over preimage_minus
  double mu_minus = 0.0;
  /// int w over preimage_plus
  double mu_plus = 0.0;
  double leb_plus = 0.0;
  double mu_minus_error = 0.0;
  double mu_plus_error = 0.0;

  bool matched() const { return preimage_minus.measure() > 0.0; }
};

struct DominanceOptions {
  QuadOptions quad{};
  /// Slack for mu_minus <= mu_plus; widened to 3x the quadrature error.
  double tol = 1e-10;
  BinScheme scheme = BinScheme::EqualMass;
  /// Grid for segment detection; 0 selects measure(X)/4096.
  double grid_h = 0.0;
};

/// Points of X+ whose g' value is attained somewhere on X-.
IntervalSet match_set(const RealFn& omega, const RealFn& g_prime, const SignPartition& part, double grid_h = 0.0);

/// Per-bin preimages in X- and X+ and the induced masses.
std::vector<BinMeasures> induced_measures(const RealFn& omega, const RealFn& g_prime, const SignPartition& part,
                                          const ValueBins& bins, const DominanceOptions& opts = {});
std::vector<BinMeasures> induced_measures(const RealFn& omega, const RealFn& g_prime,
                                          const std::vector<MonotoneSegment>& segments, const SignPartition& part,
                                          const ValueBins& bins, const DominanceOptions& opts);

struct DominanceVerdict {
  bool dominated = true;
  std::vector<std::size_t> violated_bins;
};

/// Bin k is violated when mu_minus - mu_plus exceeds
/// max(tol, 3 * (mu_minus_error + mu_plus_error)).
DominanceVerdict check_dominance(const std::vector<BinMeasures>& measures, double tol);

/// Step-function transformed weights: on each matched bin's X+ preimage the
/// constant (mu_plus - mu_minus) / leb_plus, w elsewhere on X+, 0 on X-.
/// Throws DominanceError when a matched bin has no X+ mass to absorb it.
PiecewiseWeight transform_weights_dominance(const RealFn& omega, const RealFn& g_prime, const SignPartition& part,
                                            const ValueBins& bins, const std::vector<BinMeasures>& measures,
                                            double tol = 1e-10);

struct DominanceReport {
  std::size_t n_requested = 0;
  ValueBins bins;
  std::vector<BinMeasures> measures;
  std::vector<std::size_t> violated_bins;
  bool dominated = false;
  /// Only when dominated.
  std::optional<PiecewiseWeight> omega_tilde_n;
  /// Constant value of w~_n on each matched bin (nullopt for unmatched bins).
  std::vector<std::optional<double>> bin_weight;
  /// Union of X+ preimages of matched bins at this resolution.
  IntervalSet matched_set;
  QuadratureResult beta_original;
  QuadratureResult mass_original;
  std::optional<QuadratureResult> beta_transformed;
  std::optional<QuadratureResult> mass_transformed;
  /// |int w g' - int w~_n g'| and |int w - int w~_n| (dominated only).
  std::optional<double> preservation_residual;
  std::optional<double> mass_residual;
};

/// Runs the binned construction once per bin count in `n_schedule`.
std::vector<DominanceReport> refine(const RealFn& omega, const RealFn& g_prime, const SignPartition& part,
                                    const std::vector<std::size_t>& n_schedule, const DominanceOptions& opts = {});

}  // namespace salvage
