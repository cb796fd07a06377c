#include "semitorus/equidist.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "semitorus/error.hpp"

namespace semitorus {

namespace {

constexpr unsigned kGridBits = 192;

class Mpfr {
 public:
  explicit Mpfr(unsigned bits) { mpfr_init2(v_, static_cast<mpfr_prec_t>(bits)); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

unsigned bit_length(const Integer& z) {
  return z == 0 ? 0 : static_cast<unsigned>(mpz_sizeinbase(z.get_mpz_t(), 2));
}

Integer pow2(unsigned bits) {
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, bits);
  return out;
}

// Accumulates cos and sin of 2 pi t onto the fixed-point grid.
class TermAccumulator {
 public:
  explicit TermAccumulator(unsigned working_bits)
      : bits_(working_bits), t_(working_bits), theta_(working_bits), two_pi_(working_bits + 8),
        c_(working_bits), s_(working_bits) {
    require(working_bits >= 64, "Weyl sums need at least 64 working bits");
    mpfr_const_pi(two_pi_.get(), MPFR_RNDN);
    mpfr_mul_2ui(two_pi_.get(), two_pi_.get(), 1, MPFR_RNDN);
  }

  // t = mantissa / 2^scale in [0, 1).
  void add_dyadic(const Integer& mantissa, unsigned scale) {
    mpfr_set_z(t_.get(), mantissa.get_mpz_t(), MPFR_RNDN);
    mpfr_div_2ui(t_.get(), t_.get(), scale, MPFR_RNDN);
    accumulate();
  }

  void add_rational(const Rational& t) {
    mpfr_set_q(t_.get(), t.get_mpq_t(), MPFR_RNDN);
    accumulate();
  }

  const Integer& re_sum() const { return re_; }
  const Integer& im_sum() const { return im_; }

  /// Bound on |computed term - exact term| for an exactly known argument.
  Rational rounding_bound() const {
    // Argument conversion, the product with 2 pi and the sin/cos evaluation
    // each contribute at most a few units of 2^-bits; grid rounding adds
    // 2^-(kGridBits + 1).
    return make_rational(1, pow2(bits_ - 6)) + make_rational(1, pow2(kGridBits));
  }

 private:
  void accumulate() {
    mpfr_mul(theta_.get(), t_.get(), two_pi_.get(), MPFR_RNDN);
    mpfr_sin_cos(s_.get(), c_.get(), theta_.get(), MPFR_RNDN);
    mpfr_mul_2ui(c_.get(), c_.get(), kGridBits, MPFR_RNDN);
    mpfr_mul_2ui(s_.get(), s_.get(), kGridBits, MPFR_RNDN);
    mpfr_get_z(tmp_.get_mpz_t(), c_.get(), MPFR_RNDN);
    re_ += tmp_;
    mpfr_get_z(tmp_.get_mpz_t(), s_.get(), MPFR_RNDN);
    im_ += tmp_;
  }

  unsigned bits_;
  Mpfr t_;
  Mpfr theta_;
  Mpfr two_pi_;
  Mpfr c_;
  Mpfr s_;
  Integer tmp_;
  Integer re_ = 0;
  Integer im_ = 0;
};

ComplexValue finish(const TermAccumulator& acc, std::size_t n, const Rational& per_term_radius) {
  Integer denom = pow2(kGridBits) * Integer(static_cast<unsigned long>(n));
  ComplexValue z;
  z.re = {make_rational(acc.re_sum(), denom), per_term_radius};
  z.im = {make_rational(acc.im_sum(), denom), per_term_radius};
  return z;
}

}  // namespace

std::vector<FixedReal> orbit_points(const std::vector<Integer>& sigmas, const AngleSpec& alpha) {
  std::vector<FixedReal> out;
  if (sigmas.empty()) return out;
  Integer largest = *std::max_element(sigmas.begin(), sigmas.end());
  FixedReal a = eval_angle(alpha, 64 + bit_length(largest) + 2);
  out.reserve(sigmas.size());
  for (const auto& s : sigmas) {
    require(s >= 1, "orbit_points requires positive multipliers");
    out.push_back(a.times(s).frac());
  }
  return out;
}

std::vector<FixedReal> orbit_points(const GeneratorSet& gens, const AngleSpec& alpha, const Integer& limit) {
  require(limit >= 1, "orbit_points requires N >= 1");
  return orbit_points(enumerate_up_to(gens, limit), alpha);
}

ComplexValue weyl_sum(const std::vector<FixedReal>& points, long h, unsigned working_bits) {
  require(!points.empty(), "weyl_sum requires at least one point");
  TermAccumulator acc(working_bits);
  Integer hh(h);
  Integer habs(h < 0 ? -h : h);
  Rational worst_input = 0;
  for (const auto& p : points) {
    FixedReal t = p.times(hh).frac();
    acc.add_dyadic(t.mantissa(), t.scale());
    Rational r = t.radius();
    if (r > worst_input) worst_input = r;
  }
  // |d/dt cos(2 pi t)| <= 2 pi < 7.
  return finish(acc, points.size(), 7 * worst_input + acc.rounding_bound());
}

ComplexValue weyl_sum(const std::vector<TorusPoint>& points, long h, unsigned working_bits) {
  require(!points.empty(), "weyl_sum requires at least one point");
  TermAccumulator acc(working_bits);
  Integer hh(h);
  for (const auto& p : points) acc.add_rational(reduce_mod1(p.value() * hh).value());
  return finish(acc, points.size(), acc.rounding_bound());
}

Rational modulus_squared_upper(const ComplexValue& z) {
  auto outer = [](const CertifiedReal& c) { return abs(c.value) + c.radius; };
  Rational re = outer(z.re);
  Rational im = outer(z.im);
  return re * re + im * im;
}

namespace {

double normalized(const Rational& d, std::uint64_t n) {
  if (n <= 1) return 0.0;
  double nn = static_cast<double>(n);
  return to_double(d) * nn / std::log(nn);
}

}  // namespace

DiscrepancyReport star_discrepancy(const std::vector<TorusPoint>& points) {
  require(!points.empty(), "star_discrepancy requires at least one point");
  std::vector<Rational> xs;
  xs.reserve(points.size());
  for (const auto& p : points) xs.push_back(p.value());
  std::sort(xs.begin(), xs.end());
  const Integer n(static_cast<unsigned long>(xs.size()));
  Rational best = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Rational above = make_rational(Integer(static_cast<unsigned long>(i + 1)), n) - xs[i];
    Rational below = xs[i] - make_rational(Integer(static_cast<unsigned long>(i)), n);
    if (above > best) best = above;
    if (below > best) best = below;
  }
  DiscrepancyReport r;
  r.n = xs.size();
  r.d_star_lower = best;
  r.d_star_upper = best;
  r.normalized = normalized(best, r.n);
  return r;
}

DiscrepancyReport star_discrepancy(const std::vector<FixedReal>& points) {
  require(!points.empty(), "star_discrepancy requires at least one point");
  unsigned scale = 0;
  for (const auto& p : points) scale = std::max(scale, p.scale());
  std::vector<Integer> ms;
  ms.reserve(points.size());
  Integer worst = 0;
  for (const auto& p : points) {
    FixedReal q = p.frac().rescale(scale);
    ms.push_back(q.mantissa());
    if (q.radius_ulps() > worst) worst = q.radius_ulps();
  }
  std::sort(ms.begin(), ms.end());
  const Integer n(static_cast<unsigned long>(ms.size()));
  const Integer one = pow2(scale);
  Integer best = 0;  // in units of 1 / (n 2^scale)
  for (std::size_t i = 0; i < ms.size(); ++i) {
    Integer above = Integer(static_cast<unsigned long>(i + 1)) * one - ms[i] * n;
    Integer below = ms[i] * n - Integer(static_cast<unsigned long>(i)) * one;
    if (above > best) best = above;
    if (below > best) best = below;
  }
  Rational mid = make_rational(best, n * one);
  Rational r = make_rational(worst, one);
  DiscrepancyReport rep;
  rep.n = ms.size();
  rep.d_star_lower = mid - r < 0 ? Rational(0) : Rational(mid - r);
  rep.d_star_upper = mid + r > 1 ? Rational(1) : Rational(mid + r);
  rep.normalized = normalized(rep.d_star_upper, rep.n);
  return rep;
}

std::vector<WeylCheckpoint> weyl_profile(const std::vector<FixedReal>& points, long h,
                                         const std::vector<std::uint64_t>& checkpoints) {
  std::vector<WeylCheckpoint> out;
  std::complex<double> sum = 0;
  std::size_t next = 0;
  const double two_pi = 2 * std::acos(-1.0);
  Integer hh(h);
  for (std::size_t j = 0; j < points.size() && next < checkpoints.size(); ++j) {
    double t = points[j].times(hh).frac().to_double();
    sum += std::polar(1.0, two_pi * t);
    while (next < checkpoints.size() && checkpoints[next] == j + 1) {
      std::complex<double> avg = sum / static_cast<double>(j + 1);
      out.push_back({j + 1, std::abs(avg), avg.real()});
      ++next;
    }
  }
  return out;
}

}  // namespace semitorus
