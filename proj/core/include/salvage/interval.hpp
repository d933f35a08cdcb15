#pragma once

#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

namespace salvage {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Interval with independently open/closed ends. Infinite ends are always
/// open.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = true;
  bool hi_closed = true;

  static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
  static Interval open(double lo, double hi) { return {lo, hi, false, false}; }
  /// [lo, hi)
  static Interval left_closed(double lo, double hi) { return {lo, hi, true, false}; }
  /// (lo, hi]
  static Interval right_closed(double lo, double hi) { return {lo, hi, false, true}; }
  static Interval point(double x) { return {x, x, true, true}; }

  bool empty() const;
  bool contains(double x) const;
  double measure() const { return empty() ? 0.0 : hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool finite() const;
  bool is_point() const { return lo == hi && !empty(); }

  std::string str() const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

Interval intersect(const Interval& a, const Interval& b);

/// Finite union of pairwise disjoint, non-touching intervals kept sorted.
/// Empty intervals are never stored.
class IntervalSet {
 public:
  IntervalSet() = default;
  IntervalSet(Interval iv);  // NOLINT(google-explicit-constructor)
  IntervalSet(std::initializer_list<Interval> ivs);
  explicit IntervalSet(std::vector<Interval> ivs);

  const std::vector<Interval>& intervals() const { return ivs_; }
  auto begin() const { return ivs_.begin(); }
  auto end() const { return ivs_.end(); }
  std::size_t size() const { return ivs_.size(); }
  bool empty() const { return ivs_.empty(); }

  double measure() const;
  bool contains(double x) const;
  /// Distance from x to the closure of the set (infinity when empty).
  double distance(double x) const;

  /// Smallest closed interval containing the set.
  Interval hull() const;

  IntervalSet unite(const IntervalSet& other) const;
  IntervalSet intersect(const IntervalSet& other) const;
  /// Elements of this set not in `other`.
  IntervalSet subtract(const IntervalSet& other) const;
  /// Complement of this set inside `parent`.
  IntervalSet complement_in(const IntervalSet& parent) const { return parent.subtract(*this); }

  /// Splits every member at the given points (kept sorted) so that no
  /// resulting piece has a split point in its interior. Each split point
  /// starts a new left-closed piece.
  std::vector<Interval> split_at(const std::vector<double>& points) const;

  std::string str() const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  void normalize();
  std::vector<Interval> ivs_;
};

/// `n` points spread over the set proportionally to measure: each
/// component gets an equally spaced grid including its closed endpoints
/// (open endpoints are skipped). Isolated points are included.
std::vector<double> sample_grid(const IntervalSet& s, std::size_t n);

}  // namespace salvage
