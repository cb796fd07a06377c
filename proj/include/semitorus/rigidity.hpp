#pragma once

// Dilated balls, collisions and rational reconstruction.
//
// For x on T, delta > 0 and q in Sigma, A_q = T_q(B_delta(x)) is the ball of
// radius q * delta around qx. Two elements q1 > q2 whose points q1x and q2x
// lie within 2 delta of each other give |l x - k| <= 2 delta with l = q1 - q2,
// so x is close to the rational k / l. Repeating at M, M^2, M^4, ... and
// waiting for the candidate to stabilise certifies x = k / l.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semitorus/angle.hpp"
#include "semitorus/entropy.hpp"
#include "semitorus/equidist.hpp"
#include "semitorus/exact.hpp"
#include "semitorus/measures.hpp"
#include "semitorus/semigroup.hpp"

namespace semitorus {

struct DilationImage {
  Integer q;
  Arc arc;
};

/// A_q = dilate_arc(B_delta(x), q) for every q in Sigma ∩ [1, M].
std::vector<DilationImage> dilation_images(const TorusPoint& x, const Rational& delta, const GeneratorSet& gens,
                                           const Integer& limit);

struct CollisionWitness {
  Integer q1;  // q1 > q2
  Integer q2;
  TorusPoint overlap_point;  // lies in A_q1 ∩ A_q2
  Integer k;
  Integer ell;        // q1 - q2
  bool exact = false; // q1 x == q2 x
  /// Certified upper bound on the circular distance between q1 x and q2 x.
  Rational gap_upper;
};

/// Minimal circular gap among {q x : q in elements}, if it is at most
/// 2 delta. Exact coincidences win, then smallest ell, then smallest q2.
/// `elements` must be increasing. Irrational x is evaluated at increasing
/// precision until the answer is certified; throws PrecisionExhausted past
/// the policy cap and InsufficientElements with fewer than two elements.
std::optional<CollisionWitness> find_point_collision(const AngleSpec& x, const std::vector<Integer>& elements,
                                                     const Rational& delta, PrecisionPolicy policy = {});
std::optional<CollisionWitness> find_point_collision(const AngleSpec& x, const GeneratorSet& gens,
                                                     const Integer& limit, const Rational& delta,
                                                     PrecisionPolicy policy = {});

struct PigeonholeReport {
  Integer limit;
  Rational delta;
  Rational beta;
  std::vector<DilationImage> arcs;
  std::vector<Rational> masses;
  Rational total_mass;
  /// Arcs with mu(A_q) > delta^beta.
  std::uint64_t heavy_arcs = 0;
  /// total_mass > 1: the arcs cannot be pairwise disjoint.
  bool forced = false;
  std::optional<std::pair<Integer, Integer>> pair;  // (q1, q2), q1 > q2
  std::optional<TorusPoint> overlap_point;
};

/// Sums mu(A_q) over q in Sigma ∩ [1, M] with delta = M^-5 unless overridden.
/// When the sum exceeds 1 an overlapping pair is located by an endpoint
/// sweep and re-checked with common_point.
PigeonholeReport measure_pigeonhole(const MeasureModel& mu, const TorusPoint& x, const GeneratorSet& gens,
                                    const Integer& limit, const Rational& beta,
                                    std::optional<Rational> delta_override = std::nullopt);

struct ReconstructionStage {
  Integer limit;  // M
  Rational delta;
  std::optional<CollisionWitness> witness;
  std::optional<Rational> candidate;  // reduced k / l
  Rational kappa_bound;               // 2 M^-4
  bool kappa_verified = false;
  std::string note;
};

struct ReconstructionTrace {
  std::vector<ReconstructionStage> stages;
  bool certified = false;
  Rational value;  // meaningful when certified
  std::string reason;
};

struct ReconstructionOptions {
  Integer m1 = 100;
  unsigned max_doublings = 2;
  /// delta = M^-delta_exponent; the kappa bound is 2 M^-(delta_exponent - 1).
  /// Changing it from 5 is an expert override.
  unsigned delta_exponent = 5;
  PrecisionPolicy policy{};
};

/// Runs find_point_collision at M1, M1^2, M1^4, ... (at most max_doublings + 1
/// stages). Stops with a certified value as soon as two consecutive stages
/// give the same reduced candidate k/l and kappa_prev + kappa_cur is below
/// 1 / (l * M_cur), the spacing of fractions with denominators l and < M_cur.
/// A stage without collision ends the run uncertified.
ReconstructionTrace reconstruct_rational(const AngleSpec& x, SemigroupCache& cache,
                                         const ReconstructionOptions& options = {});
ReconstructionTrace reconstruct_rational(const AngleSpec& x, const GeneratorSet& gens,
                                         const ReconstructionOptions& options = {});

enum class Verdict { FiniteSupportDetected, LebesgueConsistent, PositiveEntropyNoConclusion, Inconclusive };
const char* to_string(Verdict v);

struct ClassifyParams {
  std::uint64_t seed = 1;
  std::uint64_t samples = 16;  // points reconstructed in the zero-entropy branch
  unsigned smb_depth = 1000;
  std::uint64_t smb_samples = 200;
  unsigned threads = 1;
  /// Estimated entropies below factor * log(smallest generator) count as 0.
  double zero_entropy_factor = 0.05;
  Integer m1 = 100;
  unsigned doublings = 2;
  Rational beta{1, 10};
  Rational eps{1, 2};
  std::vector<Rational> delta_grid = power_grid(2, 10, 30);
  unsigned dyadic_depth = 6;
  std::uint64_t ks_samples = 1000;
  /// Samples pass when D* <= ks_coefficient / sqrt(n).
  double ks_coefficient = 1.95;
  std::size_t max_atoms = 100000;
};

struct GeneratorEntropy {
  Integer p;
  double value = 0;
  bool analytic = false;
  double std_error = 0;
  bool zero = false;
};

struct ArcMassCheck {
  Arc arc;
  Rational mass;
  bool matches = false;  // mass == length
};

struct ClassificationReport {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<InvarianceReport> invariance;  // one per generator
  std::vector<Integer> invariant_generators;
  std::vector<GeneratorEntropy> entropies;  // over invariant generators
  LacunarityResult lacunarity;              // of the invariant generators
  std::optional<Lemma1Report> lemma1;
  std::vector<std::pair<TorusPoint, ReconstructionTrace>> reconstructions;
  std::vector<PigeonholeReport> pigeonholes;
  std::vector<Atom> atoms;
  std::vector<InvarianceReport> atom_invariance;
  std::vector<ArcMassCheck> arc_checks;
  std::optional<DiscrepancyReport> sample_discrepancy;
  double ks_threshold = 0;
  std::vector<std::string> notes;
};

/// Classifies mu with respect to the generators under which it is invariant.
/// Throws InvarianceViolation, with the witness arc, when mu is invariant
/// under none of them; generators that fail are reported and skipped.
ClassificationReport classify_measure(const MeasureModel& mu, const GeneratorSet& gens,
                                      const ClassifyParams& params = {});

}  // namespace semitorus
