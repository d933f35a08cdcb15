#pragma once

// Independent reference computations for the tests. Nothing here calls
// into the library's numerics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

constexpr double kPi = 3.14159265358979323846;

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
  friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Integer-coefficient polynomial, c[k] multiplies x^k.
using IntPoly = std::vector<std::int64_t>;

inline IntPoly mul(const IntPoly& a, const IntPoly& b) {
  IntPoly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline IntPoly derivative(const IntPoly& p) {
  IntPoly out;
  for (std::size_t k = 1; k < p.size(); ++k) out.push_back(static_cast<std::int64_t>(k) * p[k]);
  if (out.empty()) out.push_back(0);
  return out;
}

// Exact integral over [0, 1].
inline Rational integral01(const IntPoly& p) {
  Rational s;
  for (std::size_t k = 0; k < p.size(); ++k) s = s + Rational(p[k], static_cast<std::int64_t>(k + 1));
  return s;
}

inline long double horner(const std::vector<double>& c, long double x) {
  long double v = 0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
  return v;
}

// Exact integral of a real polynomial over [a, b] via its antiderivative,
// evaluated in extended precision.
inline double poly_integral(const std::vector<double>& c, double a, double b) {
  std::vector<double> anti(c.size() + 1, 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) anti[k + 1] = c[k] / static_cast<double>(k + 1);
  return static_cast<double>(horner(anti, b) - horner(anti, a));
}

inline double central_difference(const auto& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Brute-force induced masses per value bin. Each of `n` cells contributes
// w(mid)*dx to bin(g'(mid)), on the negative or positive side by the sign
// of w(mid); cells whose ends land in different bins (or straddle a sign
// change of w) are split into `refine` sub-cells.
struct BinMass {
  std::vector<double> mu_minus;
  std::vector<double> mu_plus;
};

template <class W, class G>
BinMass riemann_bins(const W& w, const G& gp, const std::vector<double>& edges, double lo, double hi, long n,
                     long refine = 10000) {
  const std::size_t nb = edges.size() - 1;
  BinMass out{std::vector<double>(nb, 0.0), std::vector<double>(nb, 0.0)};
  auto bin_of = [&](double y) -> long {
    if (y < edges.front() || y > edges.back()) return -1;
    std::size_t k = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), y) - edges.begin());
    if (k == 0) return -1;
    if (k > nb) k = nb;
    return static_cast<long>(k - 1);
  };
  auto add = [&](double x, double dx) {
    const long k = bin_of(gp(x));
    if (k < 0) return;
    const double v = w(x) * dx;
    if (w(x) < 0.0)
      out.mu_minus[static_cast<std::size_t>(k)] -= v;
    else
      out.mu_plus[static_cast<std::size_t>(k)] += v;
  };
  const double dx = (hi - lo) / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    const double a = lo + dx * static_cast<double>(i);
    const double b = a + dx;
    const double ea = std::nextafter(a, b);
    const double eb = std::nextafter(b, a);
    const bool split = bin_of(gp(ea)) != bin_of(gp(eb)) || (w(ea) < 0.0) != (w(eb) < 0.0);
    if (!split) {
      add(a + 0.5 * dx, dx);
      continue;
    }
    const double ddx = dx / static_cast<double>(refine);
    for (long j = 0; j < refine; ++j) add(a + ddx * (static_cast<double>(j) + 0.5), ddx);
  }
  return out;
}

}  // namespace oracle
