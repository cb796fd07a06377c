#pragma once

// Iterative construction of a multiplicative semigroup of positive lower
// density whose orbit Sigma * alpha is biased towards the window (0, 1/8).
//
// Stage 1 takes every k in (N0, 2 N0] with k alpha mod 1 in the window.
// Stage k+1 doubles N' = N_k 2^l until the current semigroup is sparse at
// 2N', then adds the window elements of (N', 2N'] not yet in it. Every stage
// records what it used so that a separate verifier can re-check it.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semitorus/angle.hpp"
#include "semitorus/equidist.hpp"
#include "semitorus/exact.hpp"
#include "semitorus/semigroup.hpp"

namespace semitorus {

struct NazarovConfig {
  AngleSpec alpha = golden_angle();
  Rational window_lo{0};
  Rational window_hi{1, 8};
  Rational slack{1, 1000};
  Rational stop_fraction{1, 100};
  /// Each stage must add at least this fraction of N' (of N0 in stage 1).
  Rational add_fraction{1, 10};
  unsigned growth_factor = 2;
  unsigned stages = 3;
  Integer n0_search_limit{100000};
  /// Skips the N0 search when set.
  std::optional<Integer> n0;
  /// Largest N for which semigroup counts are attempted.
  Integer count_cap{1000000000};
  PrecisionPolicy precision{256, 4096};
  /// Certified distance required above the bias bound.
  Rational weyl_margin{1, 1000000};
  Rational density_floor{1, 200};
};

struct StageChecks {
  bool estimate2 = false;      // window-count estimate at every n up to N_k
  bool stopping_rule = false;  // sparse at 2N', and not at N' unless l = 1
  bool added_size = false;     // |A_k| >= add_fraction * N'
  bool weyl_bound = false;     // Re >= sqrt(2)/40 - 1/100 + margin
  bool density = false;        // sigma_count / N_k >= density_floor
  bool set_equality = false;   // Sigma_k ∩ [1, N_k] == B_{N_k}
  bool closure = false;        // products from the previous snapshot kept
  bool all() const {
    return estimate2 && stopping_rule && added_size && weyl_bound && density && set_equality && closure;
  }
};

struct StageRecord {
  unsigned k = 1;
  Integer n_k;
  Integer n_prime;  // N' (N0 for stage 1)
  unsigned ell = 0; // doublings of N_{k-1}; 0 for stage 1
  /// |Sigma_{k-1} ∩ [1, 2N']| and |Sigma_{k-1} ∩ [1, N']| (stages >= 2).
  std::uint64_t count_at_stop = 0;
  std::uint64_t count_before_stop = 0;
  std::vector<Integer> added;       // A_k, increasing
  std::vector<Integer> generators;  // B_{N_k}, increasing
  std::uint64_t sigma_count = 0;
  ComplexValue weyl;
  Rational density;
  StageChecks checks;
};

struct ConstructionState {
  NazarovConfig config;
  Integer n0;
  /// The window-count estimate was checked at every n in [lo, hi].
  Integer estimate2_lo;
  Integer estimate2_hi;
  std::vector<StageRecord> stages;
  /// qualifies[k] for k <= estimate2_hi; scan cache, not part of reports.
  std::vector<std::uint8_t> qualifies;
};

/// Every k in (lo, hi] with k alpha mod 1 certified inside the window and
/// not excluded. Throws PrecisionExhausted on an undecidable k.
std::vector<Integer> qualifying_set(const AngleSpec& alpha, const Integer& lo, const Integer& hi,
                                    const std::function<bool(const Integer&)>& exclude = {},
                                    const NazarovConfig& config = {});

struct Estimate2Result {
  Integer n;
  std::uint64_t count = 0;
  Rational lower;  // n/8 - n/1000
  Rational upper;  // n/8 + n/1000
  bool holds = false;
};

/// Counts k <= n in the window and checks lower < count < upper exactly.
Estimate2Result verify_estimate2(const AngleSpec& alpha, const Integer& n, const NazarovConfig& config = {});

/// Smallest N0 <= search_limit such that the estimate holds at every n in
/// [N0, min(4 N0, search_limit)]. Throws NotFound otherwise.
Integer find_N0(const AngleSpec& alpha, const Integer& search_limit, const NazarovConfig& config = {});

/// Resolves N0 (searching unless configured) with no stages yet.
ConstructionState start_construction(const NazarovConfig& config);
/// Appends one stage. Throws ConstructionViolation when the estimate fails at
/// a used n or too few elements can be added, ResourceLimit past count_cap.
void run_stage(ConstructionState& state);
ConstructionState run_construction(const NazarovConfig& config);

struct BiasCertificate {
  ComplexValue weyl;
  unsigned working_bits = 128;
  /// Re - radius - margin >= sqrt(2)/40 - 1/100, decided exactly.
  bool holds = false;
};

/// Weyl sum of B at h = 1, retried at higher working precision while the
/// certified interval straddles the bound.
BiasCertificate certify_bias(const std::vector<Integer>& set, const NazarovConfig& config);

struct VerificationResult {
  bool ok = true;
  std::vector<std::string> failures;  // each names the violated inequality
};

/// Re-checks every stage from the recorded sets and alpha alone.
VerificationResult verify_construction(const ConstructionState& state);

}  // namespace semitorus
