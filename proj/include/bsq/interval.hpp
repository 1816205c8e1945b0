#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>

namespace bsq {

/// Closed real interval [lo, hi]. An empty interval has lo > hi.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double x) { return {x, x}; }
  static Interval empty() { return {1.0, 0.0}; }

  bool is_empty() const { return lo > hi; }
  double width() const { return is_empty() ? 0.0 : hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& o) const { return o.is_empty() || (lo <= o.lo && o.hi <= hi); }
  bool intersects(const Interval& o) const { return !is_empty() && !o.is_empty() && lo <= o.hi && o.lo <= hi; }

  Interval intersect(const Interval& o) const { return {std::max(lo, o.lo), std::min(hi, o.hi)}; }
  Interval hull(const Interval& o) const {
    if (is_empty()) return o;
    if (o.is_empty()) return *this;
    return {std::min(lo, o.lo), std::max(hi, o.hi)};
  }
  /// Pads outward by `rel` relative to the magnitude of the endpoints.
  Interval widened(double rel) const {
    const double pad = rel * std::max({1.0, std::abs(lo), std::abs(hi)});
    return {lo - pad, hi + pad};
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Interval operator-(const Interval& a, const Interval& b) { return {a.lo - b.hi, a.hi - b.lo}; }
inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }
inline Interval operator+(const Interval& a, double c) { return {a.lo + c, a.hi + c}; }
inline Interval operator-(const Interval& a, double c) { return {a.lo - c, a.hi - c}; }
inline Interval operator+(double c, const Interval& a) { return a + c; }
inline Interval operator-(double c, const Interval& a) { return -a + c; }
inline Interval operator*(double c, const Interval& a) {
  return c >= 0 ? Interval{c * a.lo, c * a.hi} : Interval{c * a.hi, c * a.lo};
}

inline std::ostream& operator<<(std::ostream& os, const Interval& iv) {
  return os << '[' << iv.lo << ", " << iv.hi << ']';
}

}  // namespace bsq
