#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "semitorus/semigroup.hpp"

using namespace semitorus;

namespace {

std::vector<long> as_longs(const std::vector<Integer>& v) {
  std::vector<long> out;
  for (const auto& z : v) out.push_back(z.get_si());
  return out;
}

}  // namespace

TEST_CASE("enumeration examples") {
  CHECK(as_longs(enumerate_up_to({2, 3}, 20)) == std::vector<long>{2, 3, 4, 6, 8, 9, 12, 16, 18});
  CHECK(as_longs(enumerate_up_to({5}, 100)) == std::vector<long>{5, 25});
  CHECK(as_longs(enumerate_up_to({2, 3, 5}, 30)) ==
        std::vector<long>{2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 16, 18, 20, 24, 25, 27, 30});
  CHECK(count_up_to({2, 3}, 100) == 19);
  CHECK(count_up_to({2}, 100) == 6);
  CHECK(count_up_to({2, 3, 5}, 30) == 17);
  CHECK(count_up_to({7}, 6) == 0);
}

TEST_CASE("membership") {
  CHECK(contains({2, 3}, 72));
  CHECK_FALSE(contains({2, 3}, 10));
  CHECK(contains({6, 10}, 60));
  CHECK_FALSE(contains({6, 10}, 1));
  CHECK_FALSE(contains({6, 10}, 30));
}

TEST_CASE("generator parsing") {
  auto g = GeneratorSet::parse("7,2,3,2");
  CHECK(g.to_string() == "2,3,7");
  CHECK(g.pairwise_coprime());
  CHECK_FALSE(GeneratorSet({4, 6}).pairwise_coprime());
  CHECK(oracle::throws_kind([] { GeneratorSet::parse("1,2"); }, ErrorKind::Parse));
  CHECK(oracle::throws_kind([] { GeneratorSet::parse("2,,3"); }, ErrorKind::Parse));
  CHECK(oracle::throws_kind([] { GeneratorSet({Integer(1)}); }, ErrorKind::InvalidArgument));
}

TEST_CASE("enumeration matches the closure oracle on random sets") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::uint64_t> g;
    std::vector<Integer> gz;
    unsigned size = 1 + rng() % 4;
    for (unsigned i = 0; i < size; ++i) {
      g.push_back(2 + rng() % 49);
      gz.emplace_back(static_cast<unsigned long>(g.back()));
    }
    std::uint64_t limit = 1 + rng() % 20000;
    auto expect = oracle::product_set(g, limit);
    auto got = enumerate_up_to(GeneratorSet(gz), Integer(static_cast<unsigned long>(limit)));
    REQUIRE(got.size() == expect.size());
    auto it = expect.begin();
    for (const auto& z : got) CHECK(z.get_ui() == *it++);
    CHECK(count_up_to(GeneratorSet(gz), Integer(static_cast<unsigned long>(limit))) == expect.size());
  }
}

TEST_CASE("the stream is strictly increasing and the cache agrees") {
  SemigroupStream s({2, 3, 5}, 5000);
  Integer prev = 0;
  std::uint64_t n = 0;
  while (auto v = s.next()) {
    CHECK(*v > prev);
    prev = *v;
    ++n;
  }
  SemigroupCache cache({2, 3, 5});
  CHECK(cache.elements_up_to(100).size() == count_up_to({2, 3, 5}, 100));
  CHECK(cache.elements_up_to(5000).size() == n);
  CHECK(cache.elements_up_to(100).size() == count_up_to({2, 3, 5}, 100));
}

TEST_CASE("lacunarity agrees with a brute-force base search") {
  CHECK(is_lacunary({2, 4, 8}).lacunary);
  CHECK(*is_lacunary({4, 8}).witness == 2);
  CHECK_FALSE(is_lacunary({2, 3}).lacunary);
  CHECK(is_lacunary({2, 3}).independent_pair.has_value());
  CHECK(*is_lacunary({9}).witness == 3);
  CHECK_FALSE(is_lacunary({6, 36, 10}).lacunary);
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::uint64_t> g;
    std::vector<Integer> gz;
    unsigned size = 1 + rng() % 3;
    for (unsigned i = 0; i < size; ++i) {
      // Bias toward perfect powers so lacunary sets actually appear.
      std::uint64_t v = rng() % 2 ? std::uint64_t(1) << (1 + rng() % 10) : 2 + rng() % 1023;
      g.push_back(v);
      gz.emplace_back(static_cast<unsigned long>(v));
    }
    auto got = is_lacunary(GeneratorSet(gz));
    std::uint64_t base = oracle::lacunary_base(g);
    CHECK(got.lacunary == (base != 0));
    if (base != 0) CHECK(got.witness->get_ui() == base);
  }
}

TEST_CASE("density profile") {
  auto r = density_profile({2}, {Integer(10), Integer(100)});
  CHECK(r.checkpoints[0].count == 3);
  CHECK(r.checkpoints[1].count == 6);
  auto r23 = density_profile({2, 3}, {Integer(100), Integer(10000), Integer(1000000)});
  CHECK(r23.checkpoints[0].log_density > r23.checkpoints[1].log_density);
  CHECK(r23.checkpoints[1].log_density > r23.checkpoints[2].log_density);
  auto empty = density_profile({7}, {Integer(5)});
  CHECK(empty.checkpoints[0].empty);
}

TEST_CASE("factorize") {
  auto f = factorize(Integer(360));
  CHECK(f.size() == 3);
  CHECK(f[Integer(2)] == 3);
  CHECK(f[Integer(3)] == 2);
  CHECK(f[Integer(5)] == 1);
}
