#pragma once

// Borel probability measures on T with exact interval queries.
//
// Three model families: Lebesgue, finitely many atoms, and digit-Bernoulli
// measures (i.i.d. base-p digits, e.g. the Cantor measure with base 3 and
// probabilities 1/2, 0, 1/2). They are test models for the rigidity
// experiments; every mass they report is an exact rational.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "semitorus/exact.hpp"

namespace semitorus {

struct Lebesgue {};

struct Atom {
  TorusPoint point;
  Rational mass;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;  // sorted by point, distinct
};

struct DigitBernoulli {
  unsigned base = 2;
  std::vector<Rational> probs;  // one per digit
};

class MeasureModel {
 public:
  using Variant = std::variant<Lebesgue, AtomicMeasure, DigitBernoulli>;

  static MeasureModel lebesgue();
  /// Atoms must be distinct with positive masses summing to exactly 1.
  static MeasureModel atomic(std::vector<Atom> atoms);
  /// Uniform on the given points.
  static MeasureModel uniform_atomic(const std::vector<Rational>& points);
  static MeasureModel digit_bernoulli(unsigned base, std::vector<Rational> probs);
  static MeasureModel cantor();
  /// Grammar: `lebesgue`, `atomic:[p1/q1=m1,...]`, `bernoulli:base=3,probs=1/2,0,1/2`.
  static MeasureModel parse(std::string_view text);

  const Variant& variant() const { return v_; }
  std::string to_string() const;

 private:
  explicit MeasureModel(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// mu((0, t]) for t in [0, 1].
Rational cdf_at(const MeasureModel& mu, const Rational& t);
Rational arc_mass(const MeasureModel& mu, const Arc& arc);
/// mu({x}).
Rational point_mass(const MeasureModel& mu, const TorusPoint& x);

struct ArcMass {
  Arc arc;
  Rational mass;
};

/// Deterministic in (seed, depth). Lebesgue draws `depth` fair digits in
/// `lebesgue_base`; digit-Bernoulli draws `depth` digits in its own base.
/// The point is followed by one anchor digit (the largest digit of positive
/// probability) and then zeros, so it lies strictly inside the half-open
/// cell its digits name.
TorusPoint sample_point(const MeasureModel& mu, std::uint64_t seed, unsigned depth,
                        unsigned lebesgue_base = 2);
/// Seed for the index-th sample of a run, so parallel sampling matches
/// sequential sampling.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index);

struct InvarianceCheck {
  Arc arc;
  Rational mass;           // mu(A)
  Rational preimage_mass;  // mu(T_q^{-1} A)
  bool equal() const { return mass == preimage_mass; }
};

struct InvarianceReport {
  std::uint64_t q = 1;
  std::vector<InvarianceCheck> checks;
  bool invariant() const;
  /// First arc whose masses differ.
  const InvarianceCheck* witness() const;
};

InvarianceReport check_invariance(const MeasureModel& mu, std::uint64_t q, const std::vector<Arc>& test_arcs);
/// Arcs (j/m, (j+1)/m] and (j/m, (j+2)/m] for m = 2..12, plus arcs
/// centred at small-denominator rationals.
std::vector<Arc> canonical_test_arcs();

/// Entropy h_mu(T_p) in nats for the supported model/p combinations.
/// Throws InvarianceViolation when mu fails the canonical T_p check and
/// UnsupportedCombination for a digit-Bernoulli measure queried at p other
/// than its base (unless its digits are uniform, which makes it Lebesgue).
double analytic_entropy(const MeasureModel& mu, std::uint64_t p);

}  // namespace semitorus
