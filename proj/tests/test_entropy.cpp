#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "semitorus/entropy.hpp"

using namespace semitorus;

TEST_CASE("p-adic cells") {
  auto c = padic_cell(TorusPoint(Rational(1, 3)), 2, 2);
  CHECK(c.index == 1);
  CHECK(c.arc() == Arc(TorusPoint(Rational(1, 4)), Rational(1, 4)));
  CHECK(padic_cell(TorusPoint(Rational(1, 2)), 2, 1).index == 0);
  auto z = padic_cell(TorusPoint(Rational(0)), 3, 1);
  CHECK(z.index == 2);
  CHECK(z.arc().contains(TorusPoint(Rational(0))));
}

TEST_CASE("cells contain their point") {
  for (unsigned p : {2u, 3u, 5u}) {
    for (unsigned n : {1u, 4u, 9u}) {
      for (int j = 0; j < 40; ++j) {
        TorusPoint x(Rational(j, 40));
        CHECK(padic_cell(x, p, n).arc().contains(x));
      }
    }
  }
}

TEST_CASE("information values") {
  TorusPoint x(Rational(5, 17));
  for (unsigned p : {2u, 3u, 5u}) {
    for (unsigned n = 1; n <= 30; ++n) {
      CHECK(information_value(MeasureModel::lebesgue(), x, p, n).value == std::log(static_cast<double>(p)));
    }
  }
  auto cantor = MeasureModel::cantor();
  TorusPoint digits02(Rational(1, 4));  // 0.020202... in base 3
  for (unsigned n : {1u, 10u, 50u}) CHECK(information_value(cantor, digits02, 3, n).value == std::log(2.0));
  CHECK(information_value(cantor, TorusPoint(Rational(1, 2)), 3, 1).infinite);
}

TEST_CASE("SMB estimates") {
  auto leb = smb_estimate(MeasureModel::lebesgue(), 2, 20, 100, 1);
  CHECK(leb.mean == std::log(2.0));
  CHECK(leb.std_error == 0);
  auto cantor = smb_estimate(MeasureModel::cantor(), 3, 200, 50, 1);
  CHECK(cantor.mean == doctest::Approx(std::log(2.0)));
  CHECK(cantor.infinite_values == 0);
  // Threads must not change the result.
  auto mu = MeasureModel::digit_bernoulli(2, {Rational(1, 4), Rational(3, 4)});
  auto one = smb_estimate(mu, 2, 100, 64, 5, 1);
  auto four = smb_estimate(mu, 2, 100, 64, 5, 4);
  CHECK(one.values == four.values);
}

TEST_CASE("Bernoulli entropy agrees with the digit frequencies of the samples") {
  auto mu = MeasureModel::digit_bernoulli(2, {Rational(1, 4), Rational(3, 4)});
  const unsigned n = 400;
  const std::uint64_t samples = 200;
  auto est = smb_estimate(mu, 2, n, samples, 21);
  double h = 0.25 * std::log(4.0) + 0.75 * std::log(4.0 / 3.0);
  CHECK(std::abs(est.mean - h) / h < 0.05);
  // Per-sample oracle: count ones among the first n binary digits.
  for (std::uint64_t i = 0; i < 10; ++i) {
    TorusPoint x = sample_point(mu, sample_seed(21, i), n);
    Rational v = x.value();
    unsigned ones = 0;
    for (unsigned d = 0; d < n; ++d) {
      v *= 2;
      if (v >= 1) {
        ++ones;
        v -= 1;
      }
    }
    double expect = -(ones * std::log(0.75) + (n - ones) * std::log(0.25)) / n;
    CHECK(est.values[i] == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("ball mass threshold is exact") {
  // (3^-10)^(1/10) is exactly 1/3; one more factor of 3 drops it below.
  CHECK(ball_mass_exceeds(Rational(1, 3), Rational(1, 177147), Rational(1, 10)));
  CHECK_FALSE(ball_mass_exceeds(Rational(1, 3), Rational(1, 59049), Rational(1, 10)));
  CHECK_FALSE(ball_mass_exceeds(Rational(1, 2), Rational(1, 4), Rational(1, 2)));
  CHECK(ball_mass_exceeds(Rational(1, 2), Rational(1, 9), Rational(1, 2)));
  CHECK_FALSE(ball_mass_exceeds(Rational(1, 4), Rational(1, 9), Rational(1, 2)));
}

TEST_CASE("window scans over a delta grid") {
  auto grid = power_grid(3, 11, 20);
  CHECK(grid.size() == 10);
  CHECK(grid.front() > grid.back());
  auto atoms = MeasureModel::uniform_atomic({Rational(1, 7), Rational(2, 7), Rational(4, 7)});
  auto a = lemma1_scan(atoms, Rational(1, 10), Rational(1, 2), grid, 64, 3);
  CHECK(a.pass_fraction == 1);
  CHECK(a.holds);

  auto leb = lemma1_scan(MeasureModel::lebesgue(), Rational(1, 2), Rational(1, 2), power_grid(2, 5, 12), 64, 3);
  for (const auto& d : leb.per_delta) CHECK(d.passes == 0);
  CHECK_FALSE(leb.holds);

  auto cantor = lemma1_scan(MeasureModel::cantor(), Rational(3, 10), Rational(1, 2), power_grid(3, 20, 20), 100, 3);
  CHECK(cantor.per_delta[0].passes <= 5);
  // Failures carry exact masses that really sit below the threshold.
  for (const auto& f : cantor.failures) {
    CHECK(f.mass == arc_mass(MeasureModel::cantor(), Arc::ball(f.x, f.delta)));
    CHECK_FALSE(ball_mass_exceeds(f.mass, f.delta, Rational(3, 10)));
  }
}
