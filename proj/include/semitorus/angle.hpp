#pragma once

// Irrational angles and certified fixed-point evaluation.
//
// An AngleSpec names a real number exactly (rational, quadratic irrational)
// or up to a declared number of decimal digits. eval_angle turns it into a
// FixedReal: a dyadic midpoint with an explicit error radius.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "semitorus/exact.hpp"

namespace semitorus {

struct RationalAngle {
  Rational value;
};

/// (a + b * sqrt(d)) / c with c > 0 and d > 1 not a perfect square.
struct QuadraticAngle {
  Integer a;
  Integer b;
  Integer c;
  Integer d;
};

/// numerator / 10^digits, known only to the declared digits: the true value
/// lies in [numerator, numerator + 1] / 10^digits.
struct DecimalAngle {
  Integer numerator;
  unsigned digits = 0;
};

class AngleSpec {
 public:
  using Variant = std::variant<RationalAngle, QuadraticAngle, DecimalAngle>;

  static AngleSpec rational(const Rational& r);
  /// Normalizes sign of c and common factors; throws on perfect-square d.
  static AngleSpec quadratic(Integer a, Integer b, Integer c, Integer d);
  static AngleSpec decimal(Integer numerator, unsigned digits);
  /// Grammar: `rational:p/q`, `quadratic:(a+b*sqrt(d))/c`, `decimal:0.ddd`.
  static AngleSpec parse(std::string_view text);

  const Variant& variant() const { return v_; }
  bool is_exact_rational() const { return std::holds_alternative<RationalAngle>(v_); }
  std::string to_string() const;

  friend bool operator==(const AngleSpec& a, const AngleSpec& b) {
    return a.to_string() == b.to_string();
  }

 private:
  explicit AngleSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

AngleSpec golden_angle();  // (-1 + sqrt 5) / 2

/// mantissa / 2^scale, with |true value - mantissa / 2^scale| <= radius / 2^scale.
class FixedReal {
 public:
  FixedReal() = default;
  FixedReal(Integer mantissa, unsigned scale, Integer radius);
  static FixedReal exact(const Rational& value, unsigned scale);

  const Integer& mantissa() const { return mantissa_; }
  unsigned scale() const { return scale_; }
  /// Error radius in units of 2^-scale.
  const Integer& radius_ulps() const { return radius_; }

  Rational midpoint() const;
  Rational radius() const;
  Rational lower() const { return midpoint() - radius(); }
  Rational upper() const { return midpoint() + radius(); }
  double to_double() const;

  /// Exact multiple; the radius scales with |k|.
  FixedReal times(const Integer& k) const;
  /// Midpoint reduced into [0, 1); the radius is unchanged.
  FixedReal frac() const;
  /// Re-express at a coarser or finer scale (radius widened for rounding).
  FixedReal rescale(unsigned scale) const;

 private:
  Integer mantissa_{0};
  unsigned scale_ = 0;
  Integer radius_{0};
};

/// Certified value with radius <= 2^(1 - bits). Throws PrecisionExhausted
/// when a decimal spec carries too few digits.
FixedReal eval_angle(const AngleSpec& spec, unsigned bits);

enum class Decision { Inside, Outside, Undecidable };
const char* to_string(Decision d);

struct PrecisionPolicy {
  unsigned start_bits = 64;
  unsigned cap_bits = 4096;
};

/// Decides whether frac(k * alpha) lies in the open interval (lo, hi),
/// doubling precision until certified. Exact rationals are decided exactly.
Decision frac_threshold_test(const Integer& k, const AngleSpec& spec, const Rational& lo,
                             const Rational& hi, PrecisionPolicy policy = {});

/// Batched frac_threshold_test for consecutive k sharing one angle and
/// window. A 128-bit fixed-point fast path handles almost every k; the rest
/// fall back to the adaptive test. Results are identical to the adaptive test
/// whenever that test is decisive.
class WindowScanner {
 public:
  WindowScanner(AngleSpec spec, Rational lo, Rational hi, PrecisionPolicy policy = {});

  Decision test(std::uint64_t k) const;
  const AngleSpec& spec() const { return spec_; }

 private:
  AngleSpec spec_;
  Rational lo_;
  Rational hi_;
  PrecisionPolicy policy_;
  bool fast_ = false;
  unsigned __int128 alpha_ = 0;   // frac(alpha) * 2^128
  unsigned __int128 radius_ = 0;  // in units of 2^-128
  unsigned __int128 lo_floor_ = 0;
  unsigned __int128 hi_ceil_ = 0;
  bool hi_is_one_ = false;
};

}  // namespace semitorus
