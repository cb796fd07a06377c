#pragma once

// p-adic partitions, the information function and entropy-rate estimation.
//
// The depth-n refinement of the partition into p cells (j/p, (j+1)/p] under
// T_p is the partition into cells (k/p^n, (k+1)/p^n]. The information of x
// at depth n is -log mu(cell containing x); divided by n it converges to the
// entropy h_mu(T_p) for mu-almost every x when mu is T_p-ergodic.

#include <cstdint>
#include <optional>
#include <vector>

#include "semitorus/exact.hpp"
#include "semitorus/measures.hpp"

namespace semitorus {

struct PadicCell {
  std::uint64_t base = 2;
  unsigned depth = 1;
  Integer index;  // in [0, base^depth - 1]
  Arc arc() const;
};

/// Cell of the depth-n partition whose arc contains x; x = 0 lies in the
/// last cell since 0 and 1 coincide.
PadicCell padic_cell(const TorusPoint& x, std::uint64_t p, unsigned n);

struct InformationSample {
  TorusPoint x;
  unsigned depth = 1;
  Rational cell_mass;
  /// -log(cell_mass) / depth, in nats. When cell_mass is exactly r^depth for
  /// a rational r the value is computed as -log(r), so that Lebesgue cells
  /// give bit-identical log p.
  double value = 0;
  bool infinite = false;  // cell_mass == 0
};

InformationSample information_value(const MeasureModel& mu, const TorusPoint& x, std::uint64_t p, unsigned n);

struct SmbEstimate {
  std::uint64_t p = 2;
  unsigned depth = 1;
  std::uint64_t samples = 0;
  double mean = 0;
  double std_error = 0;
  std::optional<double> analytic;  // h_mu(T_p) when available
  std::uint64_t infinite_values = 0;
  std::vector<double> values;
};

/// Samples are drawn from mu itself at digit depth >= n. Infinite information
/// values (cells of zero mass) indicate a broken model; they are counted in
/// infinite_values and left out of the mean.
SmbEstimate smb_estimate(const MeasureModel& mu, std::uint64_t p, unsigned n, std::uint64_t samples,
                         std::uint64_t seed, unsigned threads = 1);

struct Lemma1Failure {
  TorusPoint x;
  Rational delta;
  Rational mass;  // mu(B_delta(x)), not exceeding delta^beta
};

struct DeltaPassCount {
  Rational delta;
  std::uint64_t passes = 0;  // samples with mu(B_delta(x)) > delta^beta
};

struct Lemma1Report {
  Rational beta;
  Rational eps;
  std::vector<Rational> grid;  // descending
  std::uint64_t samples = 0;
  std::vector<TorusPoint> points;
  /// Per sample: largest grid delta such that every grid delta' <= delta
  /// passes; empty if the smallest grid value already fails.
  std::vector<std::optional<Rational>> point_delta0;
  std::vector<DeltaPassCount> per_delta;
  /// Largest grid delta0 such that more than a (1 - eps) fraction of samples
  /// pass at every grid delta <= delta0.
  std::optional<Rational> delta0;
  /// Fraction of samples passing at every grid delta <= delta0 (or at the
  /// smallest grid delta when delta0 is absent).
  Rational pass_fraction;
  bool holds = false;  // pass_fraction > 1 - eps
  std::vector<Lemma1Failure> failures;
};

/// mu(B_delta(x)) > delta^beta, decided exactly: for beta = a/b the test is
/// mass^b > delta^a.
bool ball_mass_exceeds(const Rational& mass, const Rational& delta, const Rational& beta);

Lemma1Report lemma1_scan(const MeasureModel& mu, const Rational& beta, const Rational& eps,
                         std::vector<Rational> delta_grid, std::uint64_t samples, std::uint64_t seed,
                         unsigned sample_depth = 48, std::size_t max_failures = 32);

/// Grid base^-from, ..., base^-to for from <= to.
std::vector<Rational> power_grid(unsigned base, unsigned from, unsigned to);

}  // namespace semitorus
