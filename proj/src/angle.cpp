#include "semitorus/angle.hpp"

#include <cmath>
#include <limits>
#include <regex>

#include "semitorus/error.hpp"

namespace semitorus {

namespace {

unsigned bit_length(const Integer& z) {
  if (z == 0) return 0;
  return static_cast<unsigned>(mpz_sizeinbase(z.get_mpz_t(), 2));
}

Integer shl(const Integer& z, unsigned bits) {
  Integer out;
  mpz_mul_2exp(out.get_mpz_t(), z.get_mpz_t(), bits);
  return out;
}

Integer isqrt(const Integer& z) {
  Integer out;
  mpz_sqrt(out.get_mpz_t(), z.get_mpz_t());
  return out;
}

Integer fdiv(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Integer cdiv(const Integer& a, const Integer& b) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Integer mod_pow2(const Integer& z, unsigned bits) {
  Integer out;
  mpz_fdiv_r_2exp(out.get_mpz_t(), z.get_mpz_t(), bits);
  return out;
}

bool to_u128(const Integer& z, unsigned __int128& out) {
  if (z < 0 || bit_length(z) > 128) return false;
  Integer lo = mod_pow2(z, 64);
  Integer hi;
  mpz_fdiv_q_2exp(hi.get_mpz_t(), z.get_mpz_t(), 64);
  auto get64 = [](const Integer& v) {
    std::uint64_t w = 0;
    mpz_export(&w, nullptr, -1, sizeof(w), 0, 0, v.get_mpz_t());
    return w;
  };
  out = (static_cast<unsigned __int128>(get64(hi)) << 64) | get64(lo);
  return true;
}

std::string integer_term(const Integer& z) { return z.get_str(); }

}  // namespace

AngleSpec AngleSpec::rational(const Rational& r) { return AngleSpec(RationalAngle{r}); }

AngleSpec AngleSpec::quadratic(Integer a, Integer b, Integer c, Integer d) {
  require(c != 0, "quadratic angle with zero denominator");
  require(d > 1, "quadratic angle requires d > 1");
  if (mpz_perfect_square_p(d.get_mpz_t())) {
    fail(ErrorKind::InvalidArgument, "quadratic angle requires non-square d, got " + d.get_str());
  }
  // Pull small square factors of d into b.
  for (unsigned long s = 2; s <= 100000; ++s) {
    Integer sq = Integer(s) * s;
    if (sq > d) break;
    while (mpz_divisible_p(d.get_mpz_t(), sq.get_mpz_t())) {
      d /= sq;
      b *= s;
    }
  }
  if (c < 0) {
    a = -a;
    b = -b;
    c = -c;
  }
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (g > 1) {
    a /= g;
    b /= g;
    c /= g;
  }
  if (b == 0) return AngleSpec(RationalAngle{make_rational(a, c)});
  return AngleSpec(QuadraticAngle{a, b, c, d});
}

AngleSpec AngleSpec::decimal(Integer numerator, unsigned digits) {
  return AngleSpec(DecimalAngle{std::move(numerator), digits});
}

AngleSpec AngleSpec::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    fail(ErrorKind::Parse, "angle '" + std::string(text) +
                               "' must match rational:p/q | quadratic:(a+b*sqrt(d))/c | decimal:0.ddd");
  }
  std::string kind(text.substr(0, colon));
  std::string body(text.substr(colon + 1));
  if (kind == "rational") return rational(parse_rational(body));
  if (kind == "quadratic") {
    static const std::regex re(
        R"(^\(\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*(?:/\s*([+-]?\d+))?$)");
    std::smatch m;
    if (!std::regex_match(body, m, re)) {
      fail(ErrorKind::Parse, "quadratic angle '" + body + "' must match (a+b*sqrt(d))/c");
    }
    Integer a(m[1].str().front() == '+' ? m[1].str().substr(1) : m[1].str(), 10);
    Integer b(m[3].str(), 10);
    if (m[2].str() == "-") b = -b;
    Integer c(1);
    if (m[5].matched) c = Integer(m[5].str().front() == '+' ? m[5].str().substr(1) : m[5].str(), 10);
    return quadratic(a, b, c, Integer(m[4].str(), 10));
  }
  if (kind == "decimal") {
    static const std::regex re(R"(^([+-]?)(\d+)\.(\d+)$)");
    std::smatch m;
    if (!std::regex_match(body, m, re)) {
      fail(ErrorKind::Parse, "decimal angle '" + body + "' must match [-]d.ddd");
    }
    Integer n(m[2].str() + m[3].str(), 10);
    if (m[1].str() == "-") n = -n;
    return decimal(n, static_cast<unsigned>(m[3].length()));
  }
  fail(ErrorKind::Parse, "unknown angle kind '" + kind + "' (expected rational, quadratic or decimal)");
}

std::string AngleSpec::to_string() const {
  struct Visitor {
    std::string operator()(const RationalAngle& r) const {
      return "rational:" + semitorus::to_string(r.value);
    }
    std::string operator()(const QuadraticAngle& q) const {
      std::string sign = q.b < 0 ? "-" : "+";
      Integer absb = q.b < 0 ? Integer(-q.b) : q.b;
      return "quadratic:(" + integer_term(q.a) + sign + integer_term(absb) + "*sqrt(" +
             integer_term(q.d) + "))/" + integer_term(q.c);
    }
    std::string operator()(const DecimalAngle& d) const {
      bool neg = d.numerator < 0;
      std::string digits = (neg ? Integer(-d.numerator) : d.numerator).get_str();
      if (digits.size() <= d.digits) digits.insert(0, d.digits + 1 - digits.size(), '0');
      digits.insert(digits.size() - d.digits, ".");
      return std::string("decimal:") + (neg ? "-" : "") + digits;
    }
  };
  return std::visit(Visitor{}, v_);
}

AngleSpec golden_angle() { return AngleSpec::quadratic(-1, 1, 2, 5); }

FixedReal::FixedReal(Integer mantissa, unsigned scale, Integer radius)
    : mantissa_(std::move(mantissa)), scale_(scale), radius_(std::move(radius)) {
  require(radius_ >= 0, "negative error radius");
}

FixedReal FixedReal::exact(const Rational& value, unsigned scale) {
  Rational scaled = value * shl(1, scale);
  Integer m = semitorus::floor(scaled);
  return FixedReal(m, scale, scaled == m ? Integer(0) : Integer(1));
}

Rational FixedReal::midpoint() const { return make_rational(mantissa_, shl(1, scale_)); }
Rational FixedReal::radius() const { return make_rational(radius_, shl(1, scale_)); }

double FixedReal::to_double() const {
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, mantissa_.get_mpz_t());
  return std::ldexp(mant, static_cast<int>(exp) - static_cast<int>(scale_));
}

FixedReal FixedReal::times(const Integer& k) const {
  Integer absk = k < 0 ? Integer(-k) : k;
  return FixedReal(mantissa_ * k, scale_, radius_ * absk);
}

FixedReal FixedReal::frac() const { return FixedReal(mod_pow2(mantissa_, scale_), scale_, radius_); }

FixedReal FixedReal::rescale(unsigned scale) const {
  if (scale >= scale_) {
    unsigned up = scale - scale_;
    return FixedReal(shl(mantissa_, up), scale, shl(radius_, up));
  }
  unsigned down = scale_ - scale;
  Integer m;
  mpz_fdiv_q_2exp(m.get_mpz_t(), mantissa_.get_mpz_t(), down);
  Integer r;
  mpz_cdiv_q_2exp(r.get_mpz_t(), radius_.get_mpz_t(), down);
  return FixedReal(m, scale, r + 1);
}

FixedReal eval_angle(const AngleSpec& spec, unsigned bits) {
  require(bits >= 16, "eval_angle requires at least 16 bits");
  struct Visitor {
    unsigned bits;
    FixedReal operator()(const RationalAngle& r) const { return FixedReal::exact(r.value, bits + 1); }
    FixedReal operator()(const QuadraticAngle& q) const {
      Integer absb = q.b < 0 ? Integer(-q.b) : q.b;
      unsigned s = bits + bit_length(absb + q.c) + 2;
      Integer root = isqrt(q.d * shl(1, 2 * s));  // root <= sqrt(d) 2^s < root + 1
      Integer x = shl(q.a, s) + q.b * root;
      Integer m = fdiv(x, q.c);
      Integer radius = fdiv(absb, q.c) + 2;
      return FixedReal(m, s, radius);
    }
    FixedReal operator()(const DecimalAngle& d) const {
      unsigned s = bits + 3;
      Integer pow10 = ipow(10, d.digits);
      Integer m = fdiv(shl(d.numerator, s), pow10);
      Integer radius = cdiv(shl(1, s), pow10) + 1;
      if (radius > shl(1, s + 1 - bits)) {
        fail(ErrorKind::PrecisionExhausted,
             "decimal angle with " + std::to_string(d.digits) + " digits cannot supply " +
                 std::to_string(bits) + " bits");
      }
      return FixedReal(m, s, radius);
    }
  };
  return std::visit(Visitor{bits}, spec.variant());
}

const char* to_string(Decision d) {
  switch (d) {
    case Decision::Inside: return "inside";
    case Decision::Outside: return "outside";
    case Decision::Undecidable: return "undecidable";
  }
  return "?";
}

namespace {

// Decides membership of frac(t) in (lo, hi) given t * 2^s in [m - r, m + r],
// 0 <= m < 2^s.
Decision decide_interval(const FixedReal& x, const Rational& lo, const Rational& hi) {
  Integer one = shl(1, x.scale());
  Integer low = x.mantissa() - x.radius_ulps();
  Integer high = x.mantissa() + x.radius_ulps();
  Rational lo_s = lo * one;
  Rational hi_s = hi * one;
  if (low >= 0 && high < one) {
    if (low > lo_s && high < hi_s) return Decision::Inside;
    if (high <= lo_s || low >= hi_s) return Decision::Outside;
    return Decision::Undecidable;
  }
  if (low < 0 && high < one) {
    // frac(t) in [low + 2^s, 2^s) or [0, high].
    bool upper_out = Rational(low + one) >= hi_s;
    bool lower_out = Rational(high) <= lo_s;
    return upper_out && lower_out ? Decision::Outside : Decision::Undecidable;
  }
  if (low >= 0 && high >= one) {
    bool upper_out = Rational(low) >= hi_s;
    bool lower_out = Rational(high - one) <= lo_s;
    return upper_out && lower_out ? Decision::Outside : Decision::Undecidable;
  }
  return Decision::Undecidable;
}

void check_window(const Rational& lo, const Rational& hi) {
  require(lo >= 0 && lo < hi && hi <= 1, "threshold window must satisfy 0 <= lo < hi <= 1");
}

}  // namespace

Decision frac_threshold_test(const Integer& k, const AngleSpec& spec, const Rational& lo,
                             const Rational& hi, PrecisionPolicy policy) {
  check_window(lo, hi);
  require(k >= 1, "frac_threshold_test requires k >= 1");
  if (const auto* r = std::get_if<RationalAngle>(&spec.variant())) {
    Rational v = reduce_mod1(r->value * k).value();
    return (lo < v && v < hi) ? Decision::Inside : Decision::Outside;
  }
  unsigned extra = bit_length(k);
  for (unsigned bits = policy.start_bits; bits <= policy.cap_bits; bits *= 2) {
    FixedReal x;
    try {
      x = eval_angle(spec, bits + extra).times(k).frac();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::PrecisionExhausted) return Decision::Undecidable;
      throw;
    }
    Decision d = decide_interval(x, lo, hi);
    if (d != Decision::Undecidable) return d;
  }
  return Decision::Undecidable;
}

WindowScanner::WindowScanner(AngleSpec spec, Rational lo, Rational hi, PrecisionPolicy policy)
    : spec_(std::move(spec)), lo_(std::move(lo)), hi_(std::move(hi)), policy_(policy) {
  check_window(lo_, hi_);
  if (spec_.is_exact_rational()) return;
  FixedReal a;
  try {
    a = eval_angle(spec_, 124).rescale(128).frac();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::PrecisionExhausted) return;
    throw;
  }
  Integer one = shl(1, 128);
  Integer lo_floor = semitorus::floor(lo_ * one);
  hi_is_one_ = hi_ == 1;
  Integer hi_ceil = hi_is_one_ ? Integer(0) : semitorus::ceil(hi_ * one);
  fast_ = to_u128(a.mantissa(), alpha_) && to_u128(a.radius_ulps(), radius_) &&
          radius_ < (static_cast<unsigned __int128>(1) << 60) && to_u128(lo_floor, lo_floor_) &&
          to_u128(hi_ceil, hi_ceil_);
}

Decision WindowScanner::test(std::uint64_t k) const {
  require(k >= 1, "WindowScanner::test requires k >= 1");
  if (fast_ && k < (std::uint64_t{1} << 62)) {
    using u128 = unsigned __int128;
    const u128 max = ~static_cast<u128>(0);
    u128 m = alpha_ * k;  // wraps mod 2^128, i.e. mod 1
    u128 r = radius_ * k;
    bool no_wrap = m >= r && m <= max - r;
    if (no_wrap) {
      u128 low = m - r;
      u128 high = m + r;
      bool below_hi = hi_is_one_ || high < hi_ceil_;
      if (low > lo_floor_ && below_hi) return Decision::Inside;
      if (high <= lo_floor_ || (!hi_is_one_ && low >= hi_ceil_)) return Decision::Outside;
    }
  }
  return frac_threshold_test(Integer(static_cast<unsigned long>(k)), spec_, lo_, hi_, policy_);
}

}  // namespace semitorus
