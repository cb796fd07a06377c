#include "semitorus/exact.hpp"

#include <algorithm>
#include <utility>
#include <cmath>

#include "semitorus/error.hpp"

namespace semitorus {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::PrecisionExhausted: return "precision-exhausted";
    case ErrorKind::InsufficientElements: return "insufficient-elements";
    case ErrorKind::InvarianceViolation: return "invariance-violation";
    case ErrorKind::UnsupportedCombination: return "unsupported-combination";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::ConstructionViolation: return "construction-violation";
    case ErrorKind::ResourceLimit: return "resource-limit";
  }
  return "unknown";
}

Rational make_rational(const Integer& num, const Integer& den) {
  require(den != 0, "rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

namespace {

Integer parse_integer(std::string_view text) {
  std::string s(text);
  if (s.empty()) fail(ErrorKind::Parse, "empty integer");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) fail(ErrorKind::Parse, "integer '" + s + "' has no digits");
  for (std::size_t j = i; j < s.size(); ++j) {
    if (s[j] < '0' || s[j] > '9') {
      fail(ErrorKind::Parse, "integer '" + s + "' contains a non-digit");
    }
  }
  if (s[0] == '+') s.erase(0, 1);
  return Integer(s, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text));
  Integer num = parse_integer(text.substr(0, slash));
  Integer den = parse_integer(text.substr(slash + 1));
  if (den == 0) fail(ErrorKind::Parse, "rational '" + std::string(text) + "' has zero denominator");
  return make_rational(num, den);
}

std::string to_string(const Integer& z) { return z.get_str(); }

std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Integer floor(const Rational& r) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

Integer ceil(const Rational& r) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

Integer round_nearest(const Rational& r) { return floor(r + Rational(1, 2)); }

Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

Integer ipow(const Integer& base, unsigned long exponent) {
  Integer out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
  return out;
}

Rational pow(const Rational& base, unsigned long exponent) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
  return out;
}

double to_double(const Rational& r) { return mpq_get_d(r.get_mpq_t()); }

namespace {

double log_integer(const Integer& z) {
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace

double log_rational(const Rational& r) {
  require(r > 0, "log of a non-positive rational");
  return log_integer(r.get_num()) - log_integer(r.get_den());
}

std::string to_decimal(const Rational& r, int digits, bool round_up) {
  Integer scale = ipow(10, static_cast<unsigned long>(digits));
  Rational scaled = r * scale;
  Integer n = round_up ? ceil(scaled) : floor(scaled);
  bool negative = n < 0;
  if (negative) n = -n;
  std::string s = n.get_str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits)) {
      s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    }
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  return negative ? "-" + s : s;
}

TorusPoint::TorusPoint(const Rational& value) : value_(value) {
  value_.canonicalize();
  value_ -= Rational(semitorus::floor(value_));
}

TorusPoint reduce_mod1(const Rational& r) { return TorusPoint(r); }

TorusPoint times_n(const TorusPoint& x, const Integer& n) {
  require(n >= 1, "times_n requires n >= 1");
  Rational prod = x.value() * n;
  // Reduce the numerator mod the denominator directly; the product stays in
  // lowest terms up to a common factor of n and the denominator.
  Integer num;
  mpz_fdiv_r(num.get_mpz_t(), prod.get_num_mpz_t(), prod.get_den_mpz_t());
  return TorusPoint(make_rational(num, prod.get_den()));
}

Rational circle_distance(const TorusPoint& x, const TorusPoint& y) {
  Rational d = abs(x.value() - y.value());
  Rational wrap = 1 - d;
  return d < wrap ? d : wrap;
}

Arc::Arc(TorusPoint start, const Rational& length) : start_(std::move(start)), length_(length) {
  length_.canonicalize();
  require(length_ > 0, "arc length must be positive");
  if (length_ >= 1) {
    length_ = 1;
    start_ = TorusPoint();
  }
}

Arc Arc::full_circle() { return Arc(TorusPoint(), Rational(1)); }

Arc Arc::ball(const TorusPoint& center, const Rational& radius) {
  require(radius > 0, "ball radius must be positive");
  return Arc(TorusPoint(center.value() - radius), 2 * radius);
}

TorusPoint Arc::midpoint() const { return TorusPoint(start_.value() + length_ / 2); }

bool Arc::contains(const TorusPoint& y) const {
  if (is_full()) return true;
  // Offset of y from the start, taken in (0, 1].
  Rational offset = y.value() - start_.value();
  if (offset <= 0) offset += 1;
  return offset <= length_;
}

Arc dilate_arc(const Arc& a, const Integer& q) {
  require(q >= 1, "dilate_arc requires q >= 1");
  if (a.is_full()) return a;
  Rational len = a.length() * q;
  if (len >= 1) return Arc::full_circle();
  return Arc(times_n(a.start(), q), len);
}

std::vector<Arc> preimage_arcs(const Arc& a, std::uint64_t q) {
  require(q >= 1, "preimage_arcs requires q >= 1");
  require(!a.is_full(), "preimage_arcs requires a non-full arc");
  std::vector<Arc> out;
  out.reserve(q);
  Integer qq(static_cast<unsigned long>(q));
  Rational len = a.length() / qq;
  for (std::uint64_t j = 0; j < q; ++j) {
    Rational s = (a.start().value() + Integer(static_cast<unsigned long>(j))) / qq;
    out.emplace_back(TorusPoint(s), len);
  }
  return out;
}

namespace {

struct Piece {
  Rational lo;  // exclusive
  Rational hi;  // inclusive, within (0, 1]
};

std::vector<Piece> pieces(const Arc& a) {
  if (a.is_full()) return {{Rational(0), Rational(1)}};
  Rational s = a.start().value();
  Rational e = a.end();
  if (e <= 1) return {{s, e}};
  return {{s, Rational(1)}, {Rational(0), e - 1}};
}

}  // namespace

std::optional<TorusPoint> common_point(const Arc& a, const Arc& b) {
  for (const auto& pa : pieces(a)) {
    for (const auto& pb : pieces(b)) {
      const Rational& lo = pa.lo < pb.lo ? pb.lo : pa.lo;
      const Rational& hi = pa.hi < pb.hi ? pa.hi : pb.hi;
      if (lo < hi) return TorusPoint(hi);
    }
  }
  return std::nullopt;
}

}  // namespace semitorus
