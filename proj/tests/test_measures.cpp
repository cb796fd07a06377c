#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "semitorus/measures.hpp"

using namespace semitorus;

namespace {

MeasureModel three_atoms() {
  return MeasureModel::uniform_atomic({Rational(1, 7), Rational(2, 7), Rational(4, 7)});
}

// mu((0, k / p^n]) for a digit-Bernoulli measure, by summing the masses of
// the depth-n cells one at a time.
Rational brute_cdf(const std::vector<Rational>& probs, unsigned n, unsigned long k) {
  unsigned long p = probs.size();
  Rational total = 0;
  for (unsigned long cell = 0; cell < k; ++cell) {
    Rational m = 1;
    unsigned long c = cell;
    for (unsigned i = 0; i < n; ++i) {
      m *= probs[c % p];
      c /= p;
    }
    total += m;
  }
  return total;
}

}  // namespace

TEST_CASE("cdf examples") {
  CHECK(cdf_at(MeasureModel::lebesgue(), Rational(3, 10)) == Rational(3, 10));
  CHECK(cdf_at(MeasureModel::cantor(), Rational(1, 3)) == Rational(1, 2));
  CHECK(cdf_at(three_atoms(), Rational(1, 2)) == Rational(2, 3));
  CHECK(cdf_at(three_atoms(), Rational(1)) == 1);
  CHECK(cdf_at(MeasureModel::cantor(), Rational(1)) == 1);
}

TEST_CASE("digit-Bernoulli cdf matches a cell-by-cell sum") {
  std::vector<Rational> probs{Rational(1, 5), Rational(1, 2), Rational(3, 10)};
  auto mu = MeasureModel::digit_bernoulli(3, probs);
  unsigned n = 4;
  unsigned long cells = 81;
  for (unsigned long k = 0; k <= cells; ++k) {
    CHECK(cdf_at(mu, Rational(k, cells)) == brute_cdf(probs, n, k));
  }
}

TEST_CASE("arc masses") {
  CHECK(arc_mass(MeasureModel::lebesgue(), Arc(TorusPoint(Rational(9, 10)), Rational(1, 5))) == Rational(1, 5));
  CHECK(arc_mass(MeasureModel::cantor(), Arc(TorusPoint(Rational(1, 3)), Rational(1, 3))) == 0);
  Arc wrap(TorusPoint(Rational(6, 7) - Rational(1, 100)), Rational(2, 100));
  CHECK(arc_mass(three_atoms(), wrap) == 0);
  CHECK(arc_mass(three_atoms(), Arc::full_circle()) == 1);
  CHECK(point_mass(three_atoms(), TorusPoint(Rational(2, 7))) == Rational(1, 3));
  CHECK(point_mass(MeasureModel::cantor(), TorusPoint(Rational(1, 4))) == 0);
}

TEST_CASE("arc mass is additive over a split") {
  std::mt19937_64 rng(3);
  auto mu = MeasureModel::digit_bernoulli(2, {Rational(1, 4), Rational(3, 4)});
  for (int trial = 0; trial < 200; ++trial) {
    Rational start = make_rational(Integer(static_cast<unsigned long>(rng() % 64)), 64);
    Rational a = make_rational(Integer(static_cast<unsigned long>(1 + rng() % 20)), 64);
    Rational b = make_rational(Integer(static_cast<unsigned long>(1 + rng() % 20)), 64);
    Rational whole = arc_mass(mu, Arc(TorusPoint(start), a + b));
    Rational parts = arc_mass(mu, Arc(TorusPoint(start), a)) + arc_mass(mu, Arc(TorusPoint(start + a), b));
    CHECK(whole == parts);
  }
}

TEST_CASE("sampling") {
  auto atoms = three_atoms();
  std::map<Rational, int> freq;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) freq[sample_point(atoms, sample_seed(9, i), 32).value()]++;
  CHECK(freq.size() == 3);
  double sigma = std::sqrt(draws * (1.0 / 3) * (2.0 / 3));
  for (auto& [p, c] : freq) CHECK(std::abs(c - draws / 3.0) < 3 * sigma);

  for (int i = 0; i < 50; ++i) {
    TorusPoint x = sample_point(MeasureModel::cantor(), sample_seed(4, i), 40);
    Rational v = x.value();
    for (int d = 0; d < 40; ++d) {
      v *= 3;
      Integer digit = floor(v);
      CHECK(digit != 1);
      v -= Rational(digit);
    }
  }
  TorusPoint a = sample_point(MeasureModel::lebesgue(), 17, 64);
  TorusPoint b = sample_point(MeasureModel::lebesgue(), 17, 64);
  CHECK(a == b);
  CHECK(a.value().get_den() <= Integer(1) << 66);
}

TEST_CASE("invariance checks") {
  std::mt19937_64 rng(8);
  std::vector<Arc> random_arcs;
  for (int i = 0; i < 200; ++i) {
    random_arcs.emplace_back(TorusPoint(Rational(rng() % 243, 243)), Rational(1 + rng() % 120, 243));
  }
  CHECK(check_invariance(MeasureModel::lebesgue(), 7, canonical_test_arcs()).invariant());
  CHECK(check_invariance(MeasureModel::cantor(), 3, random_arcs).invariant());
  CHECK(check_invariance(three_atoms(), 2, canonical_test_arcs()).invariant());
  auto not3 = check_invariance(three_atoms(), 3, canonical_test_arcs());
  CHECK_FALSE(not3.invariant());
  REQUIRE(not3.witness() != nullptr);
  CHECK(not3.witness()->mass != not3.witness()->preimage_mass);
  CHECK_FALSE(check_invariance(MeasureModel::cantor(), 2, canonical_test_arcs()).invariant());
}

TEST_CASE("analytic entropy") {
  CHECK(analytic_entropy(MeasureModel::lebesgue(), 2) == std::log(2.0));
  CHECK(analytic_entropy(MeasureModel::cantor(), 3) == doctest::Approx(std::log(2.0)));
  CHECK(analytic_entropy(three_atoms(), 2) == 0);
  CHECK(oracle::throws_kind([&] { analytic_entropy(three_atoms(), 3); }, ErrorKind::InvarianceViolation));
  CHECK_THROWS_AS(analytic_entropy(MeasureModel::cantor(), 2), Error);
}

TEST_CASE("measure grammar") {
  auto a = MeasureModel::parse("atomic:[1/7=1/3,2/7=1/3,4/7=1/3]");
  CHECK(cdf_at(a, Rational(1, 2)) == Rational(2, 3));
  auto c = MeasureModel::parse("bernoulli:base=3,probs=1/2,0,1/2");
  CHECK(cdf_at(c, Rational(1, 3)) == Rational(1, 2));
  CHECK(std::holds_alternative<Lebesgue>(MeasureModel::parse("lebesgue").variant()));
  CHECK_THROWS_AS(MeasureModel::parse("atomic:[1/2=1/2]"), Error);
  CHECK(oracle::throws_kind([] { MeasureModel::parse("gaussian"); }, ErrorKind::Parse));
}
