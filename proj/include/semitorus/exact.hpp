#pragma once

// Exact arithmetic on the circle T = R/Z.
//
// Points are rationals reduced into [0, 1). Arcs are half-open on the left,
// (start, start + length], so that the p-adic cells (k/p^n, (k+1)/p^n]
// partition the circle without boundary ambiguity. An arc of length 1 is the
// whole circle.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semitorus {

using Integer = mpz_class;
/// Always canonical (lowest terms, positive denominator) when built through
/// make_rational / parse_rational or gmp arithmetic.
using Rational = mpq_class;

Rational make_rational(const Integer& num, const Integer& den);
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);
std::string to_string(const Integer& z);

Integer floor(const Rational& r);
Integer ceil(const Rational& r);
/// Nearest integer, ties rounded up.
Integer round_nearest(const Rational& r);
Rational abs(const Rational& r);
Rational pow(const Rational& base, unsigned long exponent);
Integer ipow(const Integer& base, unsigned long exponent);

double to_double(const Rational& r);
/// Natural logarithm of a positive rational, accurate for numerators and
/// denominators far beyond double range.
double log_rational(const Rational& r);
/// Decimal rendering with `digits` fractional digits, truncated toward -inf
/// (round_up = false) or +inf (round_up = true).
std::string to_decimal(const Rational& r, int digits, bool round_up = false);

class TorusPoint {
 public:
  TorusPoint() = default;
  /// Reduces `value` mod 1.
  explicit TorusPoint(const Rational& value);

  const Rational& value() const { return value_; }

  friend bool operator==(const TorusPoint& a, const TorusPoint& b) {
    return a.value_ == b.value_;
  }
  friend bool operator<(const TorusPoint& a, const TorusPoint& b) {
    return a.value_ < b.value_;
  }

 private:
  Rational value_{0};
};

TorusPoint reduce_mod1(const Rational& r);
TorusPoint times_n(const TorusPoint& x, const Integer& n);
Rational circle_distance(const TorusPoint& x, const TorusPoint& y);

class Arc {
 public:
  /// Throws unless 0 < length; lengths >= 1 saturate to the full circle.
  Arc(TorusPoint start, const Rational& length);

  static Arc full_circle();
  /// B_radius(center) = (center - radius, center + radius].
  static Arc ball(const TorusPoint& center, const Rational& radius);

  const TorusPoint& start() const { return start_; }
  const Rational& length() const { return length_; }
  /// start + length, not reduced mod 1.
  Rational end() const { return start_.value() + length_; }
  TorusPoint midpoint() const;
  bool is_full() const { return length_ == 1; }
  bool wraps() const { return !is_full() && end() > 1; }
  bool contains(const TorusPoint& y) const;

  friend bool operator==(const Arc& a, const Arc& b) {
    return a.start_ == b.start_ && a.length_ == b.length_;
  }

 private:
  TorusPoint start_;
  Rational length_;
};

/// Image of `a` under T_q; saturates to the full circle when q * length >= 1.
Arc dilate_arc(const Arc& a, const Integer& q);
/// The q disjoint arcs making up T_q^{-1}(a). Requires a non-full arc.
std::vector<Arc> preimage_arcs(const Arc& a, std::uint64_t q);
/// A point lying in both arcs, if they intersect.
std::optional<TorusPoint> common_point(const Arc& a, const Arc& b);
inline bool arcs_intersect(const Arc& a, const Arc& b) {
  return common_point(a, b).has_value();
}

}  // namespace semitorus
