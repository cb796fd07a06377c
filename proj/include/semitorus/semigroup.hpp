#pragma once

// Finitely generated multiplicative semigroups of N.
//
// Sigma is the set of nonempty products of generators, so 1 is never a
// member: T_1 is the identity and contributes nothing to the action, and the
// lacunarity witness condition does not depend on it. Counts are therefore
// one less than the monoid convention.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "semitorus/exact.hpp"

namespace semitorus {

class GeneratorSet {
 public:
  /// Sorts and deduplicates; every generator must be >= 2.
  explicit GeneratorSet(std::vector<Integer> generators);
  GeneratorSet(std::initializer_list<long> generators);
  /// Comma separated, e.g. "2,3,5,7".
  static GeneratorSet parse(std::string_view text);

  const std::vector<Integer>& generators() const { return gens_; }
  std::size_t size() const { return gens_.size(); }
  const Integer& smallest() const { return gens_.front(); }
  /// Pairwise coprime generators give every element a unique exponent vector.
  bool pairwise_coprime() const { return coprime_; }
  bool all_prime() const { return all_prime_; }
  std::string to_string() const;

 private:
  std::vector<Integer> gens_;
  bool coprime_ = false;
  bool all_prime_ = false;
};

/// Strictly increasing enumeration of Sigma ∩ [1, limit]. The frontier is an
/// ordered set of pending products, so duplicates collapse on insertion and
/// memory tracks the output rather than the limit.
class SemigroupStream {
 public:
  SemigroupStream(GeneratorSet gens, Integer limit);

  std::optional<Integer> next();
  const Integer& limit() const { return limit_; }

 private:
  GeneratorSet gens_;
  Integer limit_;
  std::set<Integer> frontier_;
};

std::vector<Integer> enumerate_up_to(const GeneratorSet& gens, const Integer& limit);
std::uint64_t count_up_to(const GeneratorSet& gens, const Integer& limit);
bool contains(const GeneratorSet& gens, const Integer& n);

/// Enumerations for repeated queries with growing limits over one generator
/// set. Not thread-safe.
class SemigroupCache {
 public:
  explicit SemigroupCache(GeneratorSet gens) : gens_(std::move(gens)) {}

  const GeneratorSet& gens() const { return gens_; }
  const std::vector<Integer>& elements_up_to(const Integer& limit);

 private:
  GeneratorSet gens_;
  std::map<Integer, std::vector<Integer>> cache_;
};

struct DensityCheckpoint {
  Integer n;
  std::uint64_t count = 0;
  Rational density;       // count / n
  double log_density = 0; // log(count) / log(n)
  bool empty = false;     // count == 0, log_density reported as 0
};

struct DensityReport {
  std::vector<DensityCheckpoint> checkpoints;
  /// Least-squares slope of log(count) against log(n) over the last half of
  /// the checkpoints. An empirical fit to finite data, not a growth exponent
  /// of Sigma.
  double empirical_slope = 0;
};

DensityReport density_profile(const GeneratorSet& gens, const std::vector<Integer>& checkpoints);
/// Same report for an arbitrary counting function, e.g. an explicit finite set.
DensityReport density_profile(const std::function<std::uint64_t(const Integer&)>& count,
                              const std::vector<Integer>& checkpoints);

struct LacunarityResult {
  bool lacunary = false;
  /// Smallest a >= 2 with every generator a power of a.
  std::optional<Integer> witness;
  /// Two generators with independent exponent vectors, when nonlacunary.
  std::optional<std::pair<Integer, Integer>> independent_pair;
};

LacunarityResult is_lacunary(const GeneratorSet& gens);

/// Trial-division factorization as prime -> exponent.
std::map<Integer, unsigned long> factorize(Integer n);

}  // namespace semitorus
