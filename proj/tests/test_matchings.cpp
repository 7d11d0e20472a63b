#include "doctest.h"

#include <map>

#include "spreademb/matchings.hpp"

using namespace spreademb;

namespace {

BipartitePair complete_pair(int m) {
  BipartitePair p(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) p.add_edge(x, y);
  return p;
}

// C_{2m} as an m+m bipartite pair: x_i ~ y_i and y_{i+1 mod m}.
BipartitePair cycle_pair(int m) {
  BipartitePair p(m, m);
  for (int i = 0; i < m; ++i) {
    p.add_edge(i, i);
    p.add_edge(i, (i + 1) % m);
  }
  return p;
}

BipartitePair derangement_pair(int m) {  // K_{m,m} minus the diagonal
  BipartitePair p(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      if (x != y) p.add_edge(x, y);
  return p;
}

BipartitePair lower_triangular(int m) {  // unique perfect matching
  BipartitePair p(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y <= x; ++y) p.add_edge(x, y);
  return p;
}

}  // namespace

TEST_CASE("counting oracle values") {
  CHECK(count_perfect_matchings(complete_pair(3)) == 6);
  CHECK(count_perfect_matchings(cycle_pair(4)) == 2);
  CHECK(count_perfect_matchings(derangement_pair(4)) == 9);
  CHECK(count_perfect_matchings(complete_pair(4)) == 24);
  CHECK(count_perfect_matchings(BipartitePair(2, 2)) == 0);
  CHECK(count_perfect_matchings(lower_triangular(6)) == 1);

  BipartitePair big(25, 25);
  CHECK_THROWS_AS(count_perfect_matchings(big), CapabilityError);
  CHECK_THROWS_AS(count_perfect_matchings(BipartitePair(3, 4)),
                  PreconditionError);
}

TEST_CASE("factorials on complete pairs") {
  BigInt f = 1;
  for (int m = 1; m <= 10; ++m) {
    f *= m;
    CHECK(count_perfect_matchings(complete_pair(m)) == f);
  }
}

TEST_CASE("exact sampler validity and determinism") {
  auto p = derangement_pair(6);
  Rng rng(3, 3);
  for (int t = 0; t < 50; ++t) {
    auto m = sample_uniform_matching_exact(p, rng.split("t", t));
    CHECK(is_valid_matching(p, m));
  }
  auto a = sample_uniform_matching_exact(p, Rng(9, 9));
  auto b = sample_uniform_matching_exact(p, Rng(9, 9));
  CHECK(a == b);

  CHECK_THROWS_AS(sample_uniform_matching_exact(BipartitePair(2, 2), Rng(0, 0)),
                  DomainError);
}

TEST_CASE("exact sampler is uniform on K_{3,3}") {
  auto p = complete_pair(3);
  std::map<Matching, int> freq;
  Rng rng(17, 0);
  const int n = 6000;
  for (int t = 0; t < n; ++t) ++freq[sample_uniform_matching_exact(p, rng.split("s", t))];
  CHECK(freq.size() == 6);
  for (auto& [m, c] : freq) {
    CHECK(c > 1000 - 160);  // ~5.5 sigma around n/6
    CHECK(c < 1000 + 160);
  }
}

TEST_CASE("maximum matching size") {
  CHECK(maximum_matching_size(complete_pair(5)) == 5);
  CHECK(maximum_matching_size(BipartitePair(4, 4)) == 0);
  BipartitePair star(3, 3);
  star.add_edge(0, 0);
  star.add_edge(1, 0);
  star.add_edge(2, 0);
  CHECK(maximum_matching_size(star) == 1);
  Matching m;
  CHECK(maximum_matching_size(cycle_pair(5), &m) == 5);
  CHECK(is_valid_matching(cycle_pair(5), m));
}

TEST_CASE("mcmc sampler") {
  auto p = complete_pair(2);
  std::map<Matching, int> freq;
  Rng rng(23, 0);
  const int n = 10000;
  for (int t = 0; t < n; ++t) ++freq[sample_matching_mcmc(p, 1000, rng.split("s", t))];
  CHECK(freq.size() == 2);
  for (auto& [m, c] : freq) {
    CHECK(c > n / 2 - 500);
    CHECK(c < n / 2 + 500);
  }

  // unique-matching pair: chain can never move
  auto lt = lower_triangular(5);
  auto m = sample_matching_mcmc(lt, 200, Rng(1, 1));
  for (int x = 0; x < 5; ++x) CHECK(m[x] == x);

  BipartitePair iso(3, 3);
  iso.add_edge(0, 0);
  iso.add_edge(1, 1);
  CHECK_THROWS_AS(sample_matching_mcmc(iso, 10, Rng(0, 0)), DomainError);
}

TEST_CASE("pin probability oracle values") {
  auto k4 = complete_pair(4);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) {
      auto r = exact_pin_probability(k4, x, y);
      CHECK(r.num == 6);
      CHECK(r.den == 24);
    }

  auto cyc = cycle_pair(4);
  auto r = exact_pin_probability(cyc, 0, 0);
  CHECK(r.num * 2 == r.den);  // 1/2

  auto der = derangement_pair(4);
  auto r2 = exact_pin_probability(der, 0, 1);
  CHECK(r2.num == 3);
  CHECK(r2.den == 9);

  CHECK(exact_pin_probability(der, 0, 0).num == 0);  // non-edge
}

TEST_CASE("pin probabilities sum to one") {
  Rng rng(31, 0);
  for (int t = 0; t < 10; ++t) {
    auto p = sample_bipartite(6, 6, 0.7, rng.split("p", t));
    if (count_perfect_matchings(p) == 0) continue;
    for (int x = 0; x < 6; ++x) {
      // all pins share the same denominator (the total count)
      BigInt s = 0;
      for (int y = 0; y < 6; ++y) s += exact_pin_probability(p, x, y).num;
      CHECK(s == exact_pin_probability(p, x, 0).den);
    }
  }
}

TEST_CASE("pair pin probabilities") {
  auto k4 = complete_pair(4);
  auto r = exact_pair_pin_probability(k4, 0, 0, 1, 1);
  CHECK(r.num == 2);
  CHECK(r.den == 24);  // 2!/4!

  CHECK(exact_pair_pin_probability(k4, 0, 0, 0, 1).num == 0);  // same x
  CHECK(exact_pair_pin_probability(k4, 0, 1, 2, 1).num == 0);  // same y

  // 8-cycle pair: two edges of the same matching pin jointly with prob 1/2
  auto cyc = cycle_pair(4);
  auto same = exact_pair_pin_probability(cyc, 0, 0, 1, 1);
  CHECK(same.num * 2 == same.den);
  auto cross = exact_pair_pin_probability(cyc, 0, 0, 1, 2);
  CHECK(cross.num == 0);
}

TEST_CASE("spread matching sampler") {
  // complete minus a perfect matching at m=16: dense, degree-regular
  auto p = derangement_pair(16);
  REQUIRE(maximum_matching_size(p) == 16);
  Rng rng(47, 0);
  for (int t = 0; t < 10; ++t) {
    auto m = sample_spread_matching(p, 0.25, 0.5, rng.split("t", t));
    CHECK(is_valid_matching(p, m));
  }

  auto sparse = cycle_pair(8);
  CHECK_THROWS_AS(sample_spread_matching(sparse, 0.25, 0.5, Rng(0, 0)),
                  PreconditionError);
}
