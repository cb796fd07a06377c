#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "semitorus/equidist.hpp"

using namespace semitorus;

namespace {

// sup over t of |#{x_i <= t}/N - t| by brute force over candidate t values.
double brute_star_discrepancy(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  double n = xs.size(), worst = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    worst = std::max({worst, (i + 1) / n - xs[i], xs[i] - i / n});
  }
  return worst;
}

}  // namespace

TEST_CASE("orbit points") {
  auto pts = orbit_points({2, 3}, AngleSpec::rational(Rational(1, 4)), 10);
  std::vector<Rational> expect{Rational(1, 2), Rational(3, 4), 0, Rational(1, 2), 0, Rational(1, 4)};
  REQUIRE(pts.size() == expect.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].lower() <= expect[i]);
    CHECK(expect[i] <= pts[i].upper());
  }
  auto g = orbit_points(std::vector<Integer>{5, 13}, golden_angle());
  CHECK(g[0].to_double() == doctest::Approx(0.0901699).epsilon(1e-6));
  CHECK(g[1].to_double() == doctest::Approx(0.0344419).epsilon(1e-5));
  for (const auto& p : orbit_points({2, 3}, AngleSpec::rational(0), 100)) CHECK(p.midpoint() == 0);
}

TEST_CASE("Weyl sums on exact points") {
  auto one = weyl_sum(std::vector<TorusPoint>(5, TorusPoint()), 1);
  CHECK(one.re.lower() <= 1);
  CHECK(1 <= one.re.upper());
  CHECK(abs(one.im.value) <= one.im.radius);

  auto half = weyl_sum(std::vector<TorusPoint>{TorusPoint(), TorusPoint(Rational(1, 2))}, 1);
  CHECK(abs(half.re.value) <= half.re.radius);
  CHECK(half.re.radius < Rational(1, 1000000));

  std::vector<TorusPoint> grid;
  for (int j = 0; j < 37; ++j) grid.emplace_back(Rational(j, 37));
  auto g = weyl_sum(grid, 1);
  CHECK(abs(g.re.value) <= g.re.radius);
  CHECK(abs(g.im.value) <= g.im.radius);
  CHECK(modulus_squared_upper(g) < Rational(1, 1000000));
}

TEST_CASE("Weyl sums enclose a double reference") {
  std::mt19937_64 rng(4);
  std::vector<TorusPoint> pts;
  for (int i = 0; i < 300; ++i) pts.emplace_back(Rational(static_cast<long>(rng() % 100003), 100003));
  for (long h : {1L, 3L, -2L}) {
    double re = 0, im = 0;
    for (const auto& p : pts) {
      double t = 2 * M_PI * h * to_double(p.value());
      re += std::cos(t);
      im += std::sin(t);
    }
    re /= pts.size();
    im /= pts.size();
    auto z = weyl_sum(pts, h);
    CHECK(std::fabs(z.re.to_double() - re) < 1e-12);
    CHECK(std::fabs(z.im.to_double() - im) < 1e-12);
    CHECK(z.re.radius < Rational(1, 1000000000));
  }
}

TEST_CASE("Weyl sum on certified reals encloses the exact-point sum") {
  auto alpha = AngleSpec::rational(Rational(3, 11));
  auto fixed = orbit_points({2, 3}, alpha, 1000);
  std::vector<TorusPoint> exact;
  for (const auto& q : enumerate_up_to({2, 3}, 1000)) exact.emplace_back(Rational(q) * Rational(3, 11));
  auto a = weyl_sum(fixed, 1);
  auto b = weyl_sum(exact, 1);
  CHECK(a.re.lower() <= b.re.upper());
  CHECK(b.re.lower() <= a.re.upper());
}

TEST_CASE("star discrepancy") {
  CHECK(star_discrepancy(std::vector<TorusPoint>{TorusPoint(Rational(1, 2))}).d_star_upper == Rational(1, 2));
  for (long n : {1L, 7L, 64L}) {
    std::vector<TorusPoint> pts;
    for (long i = n; i >= 1; --i) pts.emplace_back(Rational(2 * i - 1, 2 * n));
    auto r = star_discrepancy(pts);
    CHECK(r.d_star_lower == Rational(1, 2 * n));
    CHECK(r.d_star_upper == Rational(1, 2 * n));
  }
}

TEST_CASE("star discrepancy properties") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TorusPoint> pts;
    std::vector<double> xs;
    unsigned n = 1 + rng() % 60;
    for (unsigned i = 0; i < n; ++i) {
      pts.emplace_back(Rational(static_cast<long>(rng() % 997), 997));
      xs.push_back(to_double(pts.back().value()));
    }
    auto r = star_discrepancy(pts);
    CHECK(r.d_star_upper >= Rational(1, 2 * n));
    CHECK(to_double(r.d_star_upper) == doctest::Approx(brute_star_discrepancy(xs)).epsilon(1e-12));
    std::shuffle(pts.begin(), pts.end(), rng);
    CHECK(star_discrepancy(pts).d_star_upper == r.d_star_upper);
  }
}

TEST_CASE("certified star discrepancy brackets the golden orbit") {
  std::vector<Integer> ks;
  for (long k = 1; k <= 2000; ++k) ks.emplace_back(k);
  auto pts = orbit_points(ks, golden_angle());
  auto r = star_discrepancy(pts);
  CHECK(r.d_star_lower <= r.d_star_upper);
  CHECK(r.d_star_upper - r.d_star_lower < Rational(1, 1000000000));
  CHECK(r.normalized < 3);
}
