#pragma once

// Double-double arithmetic: a value is the unevaluated sum hi + lo of two
// binary64 numbers with |lo| <= ulp(hi)/2, giving roughly 106 significand
// bits. Products use fused multiply-add for the exact low part.

#include <cmath>
#include <compare>

namespace accprec {

struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double h) : hi(h), lo(0.0) {}  // NOLINT(google-explicit-constructor)
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

  /// Nearest binary64 value.
  constexpr double to_double() const { return hi + lo; }
  bool is_finite() const { return std::isfinite(hi) && std::isfinite(lo); }
};

namespace dd_detail {

inline DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

// Requires |a| >= |b|.
inline DoubleDouble quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace dd_detail

inline DoubleDouble dd_add(DoubleDouble a, DoubleDouble b) {
  using namespace dd_detail;
  DoubleDouble s = two_sum(a.hi, b.hi);
  const DoubleDouble t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble dd_neg(DoubleDouble a) { return {-a.hi, -a.lo}; }

inline DoubleDouble dd_sub(DoubleDouble a, DoubleDouble b) { return dd_add(a, dd_neg(b)); }

inline DoubleDouble dd_mul(DoubleDouble a, DoubleDouble b) {
  using namespace dd_detail;
  DoubleDouble p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline DoubleDouble dd_div(DoubleDouble a, DoubleDouble b) {
  const double q1 = a.hi / b.hi;
  DoubleDouble r = dd_sub(a, dd_mul(DoubleDouble(q1), b));
  const double q2 = r.hi / b.hi;
  r = dd_sub(r, dd_mul(DoubleDouble(q2), b));
  const double q3 = r.hi / b.hi;
  const DoubleDouble q = dd_detail::quick_two_sum(q1, q2);
  return dd_add(q, DoubleDouble(q3));
}

inline DoubleDouble dd_abs(DoubleDouble a) { return a.hi < 0.0 ? dd_neg(a) : a; }

inline DoubleDouble dd_sqrt(DoubleDouble a) {
  if (a.hi <= 0.0) return DoubleDouble(a.hi == 0.0 ? 0.0 : std::sqrt(a.hi));
  const double x = std::sqrt(a.hi);
  // One Newton step on the double approximation.
  const DoubleDouble x2 = dd_detail::two_prod(x, x);
  const double correction = (dd_sub(a, x2).to_double()) / (2.0 * x);
  return dd_detail::quick_two_sum(x, correction);
}

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) { return dd_add(a, b); }
inline DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return dd_sub(a, b); }
inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) { return dd_mul(a, b); }
inline DoubleDouble operator/(DoubleDouble a, DoubleDouble b) { return dd_div(a, b); }
inline DoubleDouble operator-(DoubleDouble a) { return dd_neg(a); }
inline DoubleDouble& operator+=(DoubleDouble& a, DoubleDouble b) { return a = dd_add(a, b); }
inline DoubleDouble& operator-=(DoubleDouble& a, DoubleDouble b) { return a = dd_sub(a, b); }

inline bool operator==(DoubleDouble a, DoubleDouble b) { return a.hi == b.hi && a.lo == b.lo; }
inline std::partial_ordering operator<=>(DoubleDouble a, DoubleDouble b) {
  if (auto c = a.hi <=> b.hi; c != 0) return c;
  return a.lo <=> b.lo;
}

}  // namespace accprec
