#pragma once

// Weyl sums and star discrepancy of finite point sets on T, with certified
// error radii.

#include <cstdint>
#include <vector>

#include "semitorus/angle.hpp"
#include "semitorus/exact.hpp"
#include "semitorus/semigroup.hpp"

namespace semitorus {

/// value +- radius, both exact rationals.
struct CertifiedReal {
  Rational value;
  Rational radius;

  Rational lower() const { return value - radius; }
  Rational upper() const { return value + radius; }
  double to_double() const { return semitorus::to_double(value); }
};

struct ComplexValue {
  CertifiedReal re;
  CertifiedReal im;
};

/// frac(sigma * alpha) for each sigma, each with error radius <= 2^-64.
std::vector<FixedReal> orbit_points(const std::vector<Integer>& sigmas, const AngleSpec& alpha);
std::vector<FixedReal> orbit_points(const GeneratorSet& gens, const AngleSpec& alpha, const Integer& limit);

/// (1/N) sum exp(2 pi i h x_j). Terms are evaluated with `working_bits` of
/// MPFR precision, rounded onto a 2^-192 fixed-point grid and summed exactly
/// in integers, so the result does not depend on summation order.
ComplexValue weyl_sum(const std::vector<FixedReal>& points, long h, unsigned working_bits = 128);
ComplexValue weyl_sum(const std::vector<TorusPoint>& points, long h, unsigned working_bits = 128);

/// Certified lower bound on |z|^2 <= 1 checks and the like.
Rational modulus_squared_upper(const ComplexValue& z);

struct DiscrepancyReport {
  std::uint64_t n = 0;
  /// Certified enclosure of D*_N; exact (lower == upper) for exact points.
  Rational d_star_lower;
  Rational d_star_upper;
  /// d_star_upper * N / log N (0 when N = 1).
  double normalized = 0;
};

/// D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N) over the sorted points.
DiscrepancyReport star_discrepancy(const std::vector<TorusPoint>& points);
/// D* is 1-Lipschitz in the sup norm of the points, so the enclosure is the
/// midpoint value widened by the largest radius.
DiscrepancyReport star_discrepancy(const std::vector<FixedReal>& points);

struct WeylCheckpoint {
  std::uint64_t n = 0;  // number of leading points summed
  double modulus = 0;
  double re = 0;
};

/// Uncertified running Weyl sums for plotting: (1/n) sum_{j<n} e(h x_j) at
/// each checkpoint n, in double precision.
std::vector<WeylCheckpoint> weyl_profile(const std::vector<FixedReal>& points, long h,
                                         const std::vector<std::uint64_t>& checkpoints);

}  // namespace semitorus
