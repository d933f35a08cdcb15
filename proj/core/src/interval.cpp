#include "salvage/interval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace salvage {

namespace {

std::string fmt(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Ordering used for normalization: by lower end, closed-before-open.
bool starts_before(const Interval& a, const Interval& b) {
  if (a.lo != b.lo) return a.lo < b.lo;
  return a.lo_closed && !b.lo_closed;
}

}  // namespace

bool Interval::empty() const {
  if (std::isnan(lo) || std::isnan(hi)) return true;
  if (lo > hi) return true;
  if (lo == hi) return !(lo_closed && hi_closed) || !std::isfinite(lo);
  return false;
}

bool Interval::contains(double x) const {
  if (empty()) return false;
  if (x < lo || x > hi) return false;
  if (x == lo && !lo_closed) return false;
  if (x == hi && !hi_closed) return false;
  return true;
}

bool Interval::finite() const { return std::isfinite(lo) && std::isfinite(hi); }

std::string Interval::str() const {
  if (empty()) return "{}";
  if (is_point()) return "{" + fmt(lo) + "}";
  return std::string(lo_closed ? "[" : "(") + fmt(lo) + ", " + fmt(hi) + (hi_closed ? "]" : ")");
}

Interval intersect(const Interval& a, const Interval& b) {
  Interval out;
  if (a.lo > b.lo) {
    out.lo = a.lo;
    out.lo_closed = a.lo_closed;
  } else if (b.lo > a.lo) {
    out.lo = b.lo;
    out.lo_closed = b.lo_closed;
  } else {
    out.lo = a.lo;
    out.lo_closed = a.lo_closed && b.lo_closed;
  }
  if (a.hi < b.hi) {
    out.hi = a.hi;
    out.hi_closed = a.hi_closed;
  } else if (b.hi < a.hi) {
    out.hi = b.hi;
    out.hi_closed = b.hi_closed;
  } else {
    out.hi = a.hi;
    out.hi_closed = a.hi_closed && b.hi_closed;
  }
  return out;
}

IntervalSet::IntervalSet(Interval iv) : ivs_{iv} { normalize(); }
IntervalSet::IntervalSet(std::initializer_list<Interval> ivs) : ivs_(ivs) { normalize(); }
IntervalSet::IntervalSet(std::vector<Interval> ivs) : ivs_(std::move(ivs)) { normalize(); }

void IntervalSet::normalize() {
  for (auto& iv : ivs_) {
    if (!std::isfinite(iv.lo)) iv.lo_closed = false;
    if (!std::isfinite(iv.hi)) iv.hi_closed = false;
  }
  std::erase_if(ivs_, [](const Interval& iv) { return iv.empty(); });
  std::sort(ivs_.begin(), ivs_.end(), starts_before);
  std::vector<Interval> merged;
  merged.reserve(ivs_.size());
  for (const auto& iv : ivs_) {
    if (!merged.empty()) {
      Interval& cur = merged.back();
      const bool overlaps = iv.lo < cur.hi || (iv.lo == cur.hi && (cur.hi_closed || iv.lo_closed));
      if (overlaps) {
        if (iv.hi > cur.hi) {
          cur.hi = iv.hi;
          cur.hi_closed = iv.hi_closed;
        } else if (iv.hi == cur.hi) {
          cur.hi_closed = cur.hi_closed || iv.hi_closed;
        }
        continue;
      }
    }
    merged.push_back(iv);
  }
  ivs_ = std::move(merged);
}

double IntervalSet::measure() const {
  double m = 0.0;
  for (const auto& iv : ivs_) m += iv.measure();
  return m;
}

bool IntervalSet::contains(double x) const {
  return std::any_of(ivs_.begin(), ivs_.end(), [x](const Interval& iv) { return iv.contains(x); });
}

double IntervalSet::distance(double x) const {
  double best = kInf;
  for (const auto& iv : ivs_) {
    if (x >= iv.lo && x <= iv.hi) return 0.0;
    best = std::min(best, x < iv.lo ? iv.lo - x : x - iv.hi);
  }
  return best;
}

Interval IntervalSet::hull() const {
  if (ivs_.empty()) return Interval::open(0.0, 0.0);
  return Interval{ivs_.front().lo, ivs_.back().hi, ivs_.front().lo_closed, ivs_.back().hi_closed};
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  std::vector<Interval> all = ivs_;
  all.insert(all.end(), other.ivs_.begin(), other.ivs_.end());
  return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ivs_.size() && j < other.ivs_.size()) {
    const Interval& a = ivs_[i];
    const Interval& b = other.ivs_[j];
    Interval c = salvage::intersect(a, b);
    if (!c.empty()) out.push_back(c);
    // Advance whichever ends first.
    if (a.hi < b.hi || (a.hi == b.hi && !a.hi_closed))
      ++i;
    else
      ++j;
  }
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::subtract(const IntervalSet& other) const {
  // Complement of `other` on the real line, then intersect.
  std::vector<Interval> comp;
  double lo = -kInf;
  bool lo_closed = false;
  for (const auto& iv : other.ivs_) {
    comp.push_back(Interval{lo, iv.lo, lo_closed, !iv.lo_closed});
    lo = iv.hi;
    lo_closed = !iv.hi_closed;
  }
  comp.push_back(Interval{lo, kInf, lo_closed, false});
  return intersect(IntervalSet(std::move(comp)));
}

std::vector<Interval> IntervalSet::split_at(const std::vector<double>& points) const {
  std::vector<double> pts = points;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Interval> out;
  for (const auto& iv : ivs_) {
    Interval cur = iv;
    auto it = std::upper_bound(pts.begin(), pts.end(), cur.lo);
    for (; it != pts.end() && *it < cur.hi; ++it) {
      Interval left{cur.lo, *it, cur.lo_closed, false};
      if (!left.empty()) out.push_back(left);
      cur.lo = *it;
      cur.lo_closed = true;
    }
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::string IntervalSet::str() const {
  if (ivs_.empty()) return "{}";
  std::string out;
  for (std::size_t k = 0; k < ivs_.size(); ++k) {
    if (k) out += " U ";
    out += ivs_[k].str();
  }
  return out;
}

std::vector<double> sample_grid(const IntervalSet& s, std::size_t n) {
  std::vector<double> out;
  const double total = s.measure();
  for (const auto& iv : s) {
    if (iv.is_point()) {
      out.push_back(iv.lo);
      continue;
    }
    if (!iv.finite()) continue;
    const double share = total > 0.0 ? iv.measure() / total : 1.0 / static_cast<double>(s.size());
    const auto m = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(share * static_cast<double>(n))));
    const double h = iv.measure() / static_cast<double>(m - 1);
    for (std::size_t k = 0; k < m; ++k) {
      const double x = k + 1 == m ? iv.hi : iv.lo + h * static_cast<double>(k);
      if (iv.contains(x)) out.push_back(x);
    }
  }
  return out;
}

}  // namespace salvage
