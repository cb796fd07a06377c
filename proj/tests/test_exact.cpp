#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "semitorus/exact.hpp"

using namespace semitorus;

TEST_CASE("rational parsing and rounding") {
  CHECK(parse_rational("6/4") == Rational(3, 2));
  CHECK(parse_rational("-2") == Rational(-2));
  CHECK(to_string(parse_rational("10/-4")) == "-5/2");
  CHECK(oracle::throws_kind([] { parse_rational("1/0"); }, ErrorKind::Parse));
  CHECK(oracle::throws_kind([] { parse_rational("x"); }, ErrorKind::Parse));
  CHECK(floor(Rational(-1, 3)) == -1);
  CHECK(ceil(Rational(-1, 3)) == 0);
  CHECK(round_nearest(Rational(5, 2)) == 3);
  CHECK(round_nearest(Rational(-5, 2)) == -2);
  CHECK(to_decimal(Rational(1, 3), 4) == "0.3333");
  CHECK(to_decimal(Rational(1, 3), 4, true) == "0.3334");
}

TEST_CASE("torus points reduce mod 1 and compare canonically") {
  CHECK(TorusPoint(Rational(-1, 3)).value() == Rational(2, 3));
  CHECK(TorusPoint(Rational(7, 3)).value() == Rational(1, 3));
  CHECK(TorusPoint(Rational(1)).value() == 0);
  Rational raw(2, 4);  // not in lowest terms
  CHECK(TorusPoint(raw) == TorusPoint(Rational(1, 2)));
  CHECK(times_n(TorusPoint(Rational(1, 3)), 2).value() == Rational(2, 3));
  CHECK(circle_distance(TorusPoint(Rational(1, 10)), TorusPoint(Rational(9, 10))) == Rational(1, 5));
}

TEST_CASE("arcs are half-open on the left") {
  Arc b = Arc::ball(TorusPoint(Rational(0)), Rational(1, 4));
  CHECK(b.contains(TorusPoint(Rational(1, 4))));
  CHECK_FALSE(b.contains(TorusPoint(Rational(3, 4))));
  CHECK(b.contains(TorusPoint(Rational(0))));
  CHECK(b.wraps());
  CHECK(Arc(TorusPoint(Rational(1, 3)), Rational(3, 2)).is_full());
  CHECK(oracle::throws_kind([] { Arc(TorusPoint(), Rational(0)); }, ErrorKind::InvalidArgument));
}

TEST_CASE("dilation of a ball") {
  Arc a = dilate_arc(Arc::ball(TorusPoint(Rational(1, 3)), Rational(1, 100)), 2);
  CHECK(a.midpoint() == TorusPoint(Rational(2, 3)));
  CHECK(a.length() == Rational(1, 25));
  CHECK(dilate_arc(Arc::ball(TorusPoint(Rational(1, 3)), Rational(1, 10)), 5).is_full());
}

TEST_CASE("preimage arcs match membership of q y") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    unsigned q = 2 + rng() % 5;
    Arc a(TorusPoint(Rational(rng() % 24, 24)), Rational(1 + rng() % 23, 24));
    auto pieces = preimage_arcs(a, q);
    CHECK(pieces.size() == q);
    for (unsigned j = 0; j < 240; ++j) {
      TorusPoint y(Rational(2 * j + 1, 480));
      bool in_pre = false;
      for (const auto& p : pieces) in_pre = in_pre || p.contains(y);
      CHECK(in_pre == a.contains(times_n(y, q)));
    }
  }
}

TEST_CASE("common_point agrees with a grid search") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    Arc a(TorusPoint(Rational(rng() % 24, 24)), Rational(1 + rng() % 12, 24));
    Arc b(TorusPoint(Rational(rng() % 24, 24)), Rational(1 + rng() % 12, 24));
    bool grid = false;
    for (unsigned j = 0; j < 48 && !grid; ++j) {
      TorusPoint y(Rational(2 * j + 1, 96));
      grid = a.contains(y) && b.contains(y);
    }
    auto p = common_point(a, b);
    CHECK(p.has_value() == grid);
    if (p) {
      CHECK(a.contains(*p));
      CHECK(b.contains(*p));
    }
  }
}
