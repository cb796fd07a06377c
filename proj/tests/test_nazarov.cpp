#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "semitorus/nazarov.hpp"
#include "semitorus/report.hpp"

using namespace semitorus;

namespace {

std::vector<long> as_longs(const std::vector<Integer>& v) {
  std::vector<long> out;
  for (const auto& z : v) out.push_back(z.get_si());
  return out;
}

const ConstructionState& golden_run() {
  static const ConstructionState state = [] {
    NazarovConfig cfg;
    cfg.stages = 3;
    return run_construction(cfg);
  }();
  return state;
}

}  // namespace

TEST_CASE("qualifying sets") {
  CHECK(as_longs(qualifying_set(golden_angle(), 0, 13)) == std::vector<long>{5, 13});
  CHECK(as_longs(qualifying_set(golden_angle(), 0, 13, [](const Integer& k) { return k == 5; })) ==
        std::vector<long>{13});
  CHECK(qualifying_set(AngleSpec::rational(Rational(1, 4)), 0, 100).empty());
}

TEST_CASE("window-count estimate") {
  auto small = verify_estimate2(golden_angle(), 13);
  CHECK(small.count == 2);
  CHECK(small.lower == Rational(13, 8) - Rational(13, 1000));
  CHECK_FALSE(small.holds);

  auto big = verify_estimate2(golden_angle(), 10000);
  CHECK(big.holds);
  // Independent count with a high-precision reference.
  oracle::MpfrQuadratic ref(-1, 1, 2, 5, 256);
  std::uint64_t count = 0;
  for (long k = 1; k <= 10000; ++k) {
    double f = ref.frac_times(k);
    count += f > 0 && f < 0.125;
  }
  CHECK(big.count == count);
  CHECK_FALSE(verify_estimate2(AngleSpec::rational(Rational(1, 4)), 500).holds);
}

TEST_CASE("N0 search") {
  Integer n0 = find_N0(golden_angle(), 100000);
  CHECK(n0 <= 10000);
  Integer hi = std::min(Integer(4 * n0), Integer(100000));
  for (Integer n = n0; n <= hi; n += 1) CHECK(verify_estimate2(golden_angle(), n).holds);
  CHECK_FALSE(verify_estimate2(golden_angle(), n0 - 1).holds);
  CHECK(oracle::throws_kind([] { find_N0(AngleSpec::rational(Rational(1, 4)), 100000); }, ErrorKind::NotFound));
  CHECK(oracle::throws_kind([] { find_N0(AngleSpec::decimal(Integer(618034), 6), 100000); },
                            ErrorKind::PrecisionExhausted));
}

TEST_CASE("golden construction") {
  const auto& s = golden_run();
  REQUIRE(s.stages.size() == 3);
  const auto& st1 = s.stages[0];
  CHECK(st1.n_k == 2 * s.n0);
  CHECK(Rational(st1.generators.size()) >= Rational(s.n0) / 10);
  for (std::size_t k = 0; k < s.stages.size(); ++k) {
    const auto& st = s.stages[k];
    CHECK(st.checks.all());
    if (k > 0) {
      CHECK(st.n_k > s.stages[k - 1].n_k);
      CHECK(st.n_k == 2 * st.n_prime);
      CHECK(Rational(st.count_at_stop) <= Rational(st.n_k) / 100);
    }
    // A_k sits in (N_k / 2, N_k] and inside the window.
    for (const auto& a : st.added) {
      CHECK(2 * a > st.n_k);
      CHECK(a <= st.n_k);
      CHECK(frac_threshold_test(a, golden_angle(), 0, Rational(1, 8)) == Decision::Inside);
    }
    CHECK(st.weyl.re.lower() >= Rational(2535, 100000));
    CHECK(st.density >= Rational(1, 200));
    // Sigma_k ∩ [1, N_k] equals the generator snapshot.
    GeneratorSet gens(st.generators);
    CHECK(enumerate_up_to(gens, st.n_k) == st.generators);
  }
  CHECK(s.estimate2_lo == s.n0);
  CHECK(s.estimate2_hi >= s.stages.back().n_k);
  CHECK(verify_construction(s).ok);
}

TEST_CASE("verification catches tampering") {
  auto s = golden_run();
  s.stages[1].generators.pop_back();
  auto v = verify_construction(s);
  CHECK_FALSE(v.ok);
  CHECK_FALSE(v.failures.empty());

  auto t = golden_run();
  t.stages[2].weyl.re.value += Rational(1, 10);
  CHECK_FALSE(verify_construction(t).ok);
}

TEST_CASE("rational angle pushed past the N0 search fails the lazy check") {
  NazarovConfig cfg;
  cfg.alpha = AngleSpec::rational(Rational(1, 4));
  cfg.n0 = Integer(1000);
  cfg.stages = 1;
  CHECK(oracle::throws_kind([&] { run_construction(cfg); }, ErrorKind::ConstructionViolation));
}

TEST_CASE("Weyl bias bound") {
  NazarovConfig cfg;
  auto inside = qualifying_set(golden_angle(), 0, 3000);
  CHECK(certify_bias(inside, cfg).holds);
  CHECK(certify_bias(inside, cfg).weyl.re.lower() >= Rational(7, 10));

  NazarovConfig bad;
  bad.window_lo = Rational(1, 2);
  bad.window_hi = Rational(5, 8);
  auto adversarial = qualifying_set(golden_angle(), 0, 3000, {}, bad);
  auto cert = certify_bias(adversarial, bad);
  CHECK_FALSE(cert.holds);
  CHECK(cert.weyl.re.upper() < 0);
}

TEST_CASE("JSON round trip and determinism") {
  const auto& s = golden_run();
  std::string text = dump(to_json(s));
  auto back = construction_from_json(Json::parse(text));
  CHECK(verify_construction(back).ok);
  CHECK(dump(to_json(back)) == text);

  NazarovConfig cfg;
  cfg.stages = 2;
  CHECK(dump(to_json(run_construction(cfg))) == dump(to_json(run_construction(cfg))));
}
