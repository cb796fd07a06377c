#include "semitorus/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semitorus/error.hpp"

namespace semitorus {

namespace {

bool is_prime(const Integer& n) { return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0; }

Integer gcd(const Integer& a, const Integer& b) {
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

}  // namespace

GeneratorSet::GeneratorSet(std::vector<Integer> generators) : gens_(std::move(generators)) {
  require(!gens_.empty(), "generator set must be nonempty");
  std::sort(gens_.begin(), gens_.end());
  gens_.erase(std::unique(gens_.begin(), gens_.end()), gens_.end());
  require(gens_.front() >= 2, "generators must be >= 2");
  coprime_ = true;
  all_prime_ = true;
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    if (!is_prime(gens_[i])) all_prime_ = false;
    for (std::size_t j = i + 1; coprime_ && j < gens_.size(); ++j) {
      if (gcd(gens_[i], gens_[j]) != 1) coprime_ = false;
    }
  }
}

GeneratorSet::GeneratorSet(std::initializer_list<long> generators)
    : GeneratorSet([&] {
        std::vector<Integer> v;
        for (long g : generators) v.emplace_back(g);
        return v;
      }()) {}

GeneratorSet GeneratorSet::parse(std::string_view text) {
  std::vector<Integer> gens;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    auto token = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    Rational r = parse_rational(token);
    if (r.get_den() != 1) fail(ErrorKind::Parse, "generator '" + std::string(token) + "' is not an integer");
    if (r < 2) fail(ErrorKind::Parse, "generator '" + std::string(token) + "' must be >= 2");
    gens.push_back(r.get_num());
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return GeneratorSet(std::move(gens));
}

std::string GeneratorSet::to_string() const {
  std::string out;
  for (const auto& g : gens_) {
    if (!out.empty()) out += ",";
    out += g.get_str();
  }
  return out;
}

SemigroupStream::SemigroupStream(GeneratorSet gens, Integer limit)
    : gens_(std::move(gens)), limit_(std::move(limit)) {
  require(limit_ >= 1, "semigroup limit must be >= 1");
  for (const auto& g : gens_.generators()) {
    if (g > limit_) break;
    frontier_.insert(g);
  }
}

std::optional<Integer> SemigroupStream::next() {
  if (frontier_.empty()) return std::nullopt;
  auto node = frontier_.extract(frontier_.begin());
  Integer v = std::move(node.value());
  Integer bound;
  mpz_fdiv_q(bound.get_mpz_t(), limit_.get_mpz_t(), v.get_mpz_t());
  for (const auto& g : gens_.generators()) {
    if (g > bound) break;
    frontier_.insert(v * g);
  }
  return v;
}

std::vector<Integer> enumerate_up_to(const GeneratorSet& gens, const Integer& limit) {
  std::vector<Integer> out;
  SemigroupStream stream(gens, limit);
  while (auto v = stream.next()) out.push_back(std::move(*v));
  return out;
}

namespace {

// Exponent-lattice walk; valid when every element has a unique
// factorization over the generators.
std::uint64_t count_unique(const std::vector<Integer>& gens, std::size_t index, const Integer& bound) {
  // Counts products (including the empty one) of gens[index..] that are <= bound.
  if (index == gens.size()) return 1;
  std::uint64_t total = 0;
  Integer rest = bound;
  while (true) {
    total += count_unique(gens, index + 1, rest);
    if (gens[index] > rest) break;
    mpz_fdiv_q(rest.get_mpz_t(), rest.get_mpz_t(), gens[index].get_mpz_t());
  }
  return total;
}

}  // namespace

std::uint64_t count_up_to(const GeneratorSet& gens, const Integer& limit) {
  require(limit >= 1, "semigroup limit must be >= 1");
  if (gens.pairwise_coprime()) return count_unique(gens.generators(), 0, limit) - 1;
  std::uint64_t n = 0;
  SemigroupStream stream(gens, limit);
  while (stream.next()) ++n;
  return n;
}

namespace {

bool contains_memo(const GeneratorSet& gens, const Integer& n, std::map<Integer, bool>& memo) {
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  bool found = false;
  for (const auto& g : gens.generators()) {
    if (g > n) break;
    if (!mpz_divisible_p(n.get_mpz_t(), g.get_mpz_t())) continue;
    Integer rest = n / g;
    if (rest == 1 || contains_memo(gens, rest, memo)) {
      found = true;
      break;
    }
  }
  memo.emplace(n, found);
  return found;
}

}  // namespace

bool contains(const GeneratorSet& gens, const Integer& n) {
  require(n >= 1, "contains requires n >= 1");
  if (n == 1) return false;
  if (gens.pairwise_coprime() && gens.all_prime()) {
    Integer rest = n;
    for (const auto& p : gens.generators()) {
      while (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) rest /= p;
    }
    return rest == 1;
  }
  std::map<Integer, bool> memo;
  return contains_memo(gens, n, memo);
}

const std::vector<Integer>& SemigroupCache::elements_up_to(const Integer& limit) {
  auto it = cache_.find(limit);
  if (it != cache_.end()) return it->second;
  // Reuse a larger enumeration when one exists.
  auto larger = cache_.lower_bound(limit);
  if (larger != cache_.end()) {
    const auto& src = larger->second;
    auto end = std::upper_bound(src.begin(), src.end(), limit);
    return cache_.emplace(limit, std::vector<Integer>(src.begin(), end)).first->second;
  }
  return cache_.emplace(limit, enumerate_up_to(gens_, limit)).first->second;
}

namespace {

double log_integer(const Integer& z) { return log_rational(Rational(z)); }

}  // namespace

DensityReport density_profile(const std::function<std::uint64_t(const Integer&)>& count,
                              const std::vector<Integer>& checkpoints) {
  require(!checkpoints.empty(), "density_profile requires checkpoints");
  require(std::is_sorted(checkpoints.begin(), checkpoints.end()), "checkpoints must be ascending");
  DensityReport report;
  for (const auto& n : checkpoints) {
    require(n >= 1, "checkpoints must be >= 1");
    DensityCheckpoint cp;
    cp.n = n;
    cp.count = count(n);
    cp.density = make_rational(Integer(static_cast<unsigned long>(cp.count)), n);
    cp.empty = cp.count == 0;
    if (!cp.empty && n > 1) {
      cp.log_density = std::log(static_cast<double>(cp.count)) / log_integer(n);
    }
    report.checkpoints.push_back(cp);
  }
  // Fit over the last half (at least two points when available).
  std::size_t total = report.checkpoints.size();
  std::size_t first = total / 2;
  if (total - first < 2 && total >= 2) first = total - 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = first; i < total; ++i) {
    const auto& cp = report.checkpoints[i];
    if (cp.empty) continue;
    double x = log_integer(cp.n);
    double y = std::log(static_cast<double>(cp.count));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  double denom = static_cast<double>(m) * sxx - sx * sx;
  if (m >= 2 && denom > 0) report.empirical_slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
  return report;
}

DensityReport density_profile(const GeneratorSet& gens, const std::vector<Integer>& checkpoints) {
  return density_profile([&](const Integer& n) { return count_up_to(gens, n); }, checkpoints);
}

std::map<Integer, unsigned long> factorize(Integer n) {
  require(n >= 1, "factorize requires n >= 1");
  std::map<Integer, unsigned long> out;
  for (Integer p = 2; p * p <= n; ++p) {
    while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
      ++out[p];
      n /= p;
    }
  }
  if (n > 1) ++out[n];
  return out;
}

LacunarityResult is_lacunary(const GeneratorSet& gens) {
  // g = a^n for some a iff the exponent vector of g is a multiple of the
  // primitive vector of a. All generators share a base iff their primitive
  // exponent vectors coincide; that shared vector gives the smallest base.
  using Vector = std::map<Integer, unsigned long>;
  std::vector<Vector> primitive;
  for (const auto& g : gens.generators()) {
    Vector e = factorize(g);
    unsigned long common = 0;
    for (const auto& [p, k] : e) common = std::gcd(common, k);
    for (auto& [p, k] : e) k /= common;
    primitive.push_back(std::move(e));
  }
  LacunarityResult result;
  for (std::size_t i = 1; i < primitive.size(); ++i) {
    if (primitive[i] != primitive[0]) {
      result.independent_pair = std::make_pair(gens.generators()[0], gens.generators()[i]);
      return result;
    }
  }
  Integer base = 1;
  for (const auto& [p, k] : primitive[0]) base *= ipow(p, k);
  result.lacunary = true;
  result.witness = base;
  return result;
}

}  // namespace semitorus
