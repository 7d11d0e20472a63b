#include "doctest.h"

#include <cmath>

#include "spreademb/regularity.hpp"

using namespace spreademb;

namespace {

BipartitePair complete_pair(int m) {
  BipartitePair p(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) p.add_edge(x, y);
  return p;
}

// Two disjoint K_{2,2} blocks inside a 4x4 pair.
BipartitePair two_block_pair() {
  BipartitePair p(4, 4);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      p.add_edge(x, y);
      p.add_edge(x + 2, y + 2);
    }
  return p;
}

BipartitePair matching_pair(int m) {
  BipartitePair p(m, m);
  for (int i = 0; i < m; ++i) p.add_edge(i, i);
  return p;
}

}  // namespace

TEST_CASE("second moment oracle values") {
  CHECK(second_moment_stat(complete_pair(4)) == 256);
  CHECK(second_moment_stat(matching_pair(4)) == 4);
  CHECK(second_moment_stat(two_block_pair()) == 32);
}

TEST_CASE("second moment on complete pairs is m^4") {
  for (int m = 1; m <= 8; ++m) {
    std::uint64_t m4 = std::uint64_t(m) * m * m * m;
    CHECK(second_moment_stat(complete_pair(m)) == m4);
  }
}

TEST_CASE("parallel and serial second moment agree") {
  Rng rng(21, 0);
  for (int t = 0; t < 8; ++t) {
    auto p = sample_bipartite(40, 37, 0.1 * (t + 1), rng.split("p", t));
    CHECK(second_moment_stat(p) == second_moment_stat_serial(p));
  }
}

TEST_CASE("quasirandom criterion fixtures") {
  CHECK(is_quasirandom(complete_pair(4), 0.01, 0.5).pass);

  auto blocks = is_quasirandom(two_block_pair(), 0.01, 0.2);
  CHECK(blocks.stat == 32);
  CHECK_FALSE(blocks.pass);  // 32 > 16 + 2.56

  auto pm = is_quasirandom(matching_pair(4), 0.01, 0.2);
  CHECK(pm.stat == 4);
  CHECK_FALSE(pm.pass);  // 4 > 1 + 2.56

  CHECK_THROWS_AS(is_quasirandom(matching_pair(4), 0.01, 0.3), PreconditionError);
}

TEST_CASE("quasirandom is monotone in xi") {
  Rng rng(13, 0);
  auto p = sample_bipartite(20, 20, 0.5, rng);
  bool prev = false;
  for (double xi : {0.0, 0.001, 0.01, 0.05, 0.2, 1.0}) {
    bool pass = is_quasirandom(p, xi, 0.1).pass;
    if (prev) CHECK(pass);
    prev = pass;
  }
  CHECK(prev);  // xi = 1 always passes: S <= |X|^2|Y|^2 trivially
}

TEST_CASE("irregularity witness search") {
  CHECK_FALSE(witness_irregularity(complete_pair(3), 0.1, 100, Rng(0, 0)).has_value());

  auto w = witness_irregularity(two_block_pair(), 0.4, 100, Rng(0, 0));
  REQUIRE(w.has_value());
  // witness must really violate the density deviation by more than eps
  double dev = std::abs(w->sub_density.value() - w->pair_density.value());
  CHECK(dev > 0.4);
  CHECK(w->xs.size() >= 2);  // |X1| >= 0.4 * 4
  CHECK(w->ys.size() >= 2);

  BipartitePair empty(5, 5);
  CHECK_FALSE(witness_irregularity(empty, 0.5, 100, Rng(0, 0)).has_value());

  CHECK_THROWS_AS(witness_irregularity(empty, 0.5, 0, Rng(0, 0)), DomainError);
}

TEST_CASE("super-regularity checks") {
  CHECK(check_super_regular(complete_pair(8), 0.1, 1.0));

  auto iso = complete_pair(4);
  for (int y = 0; y < 4; ++y) iso.remove_edge(2, y);
  CHECK_FALSE(check_super_regular(iso, 0.1, 0.25));

  CHECK_THROWS_AS(check_super_regular(BipartitePair(3, 4), 0.1, 0.2),
                  PreconditionError);
}

TEST_CASE("super-regularity on a random dense pair") {
  auto p = sample_bipartite(50, 50, 0.5, Rng(11, 0));
  CHECK(check_super_regular(p, 0.2, 0.3));
}

TEST_CASE("eps-super-regularity") {
  CHECK(check_eps_super_regular(complete_pair(6), 0.0));
  CHECK_FALSE(check_eps_super_regular(matching_pair(4), 0.1));

  // biregular quasirandom pair: degree component holds at eps = 0
  auto p = sample_biregular(24, 12, Rng(77, 0));
  ExactDensity d = density(p);
  CHECK(d.edges == 24 * 12);
  for (int x = 0; x < 24; ++x) CHECK(p.x_degree(x) == 12);
}

TEST_CASE("extraction exact edge count on complete input") {
  ExtractionParams params;
  params.target_density = 0.5;
  params.epsilon = 0.05;
  auto out = extract_exact_density_subgraph(complete_pair(20), params, Rng(1, 0));
  CHECK(out.edge_count() == 200);
}

TEST_CASE("extraction rejects infeasible target") {
  auto p = sample_bipartite(30, 30, 0.3, Rng(5, 0));
  ExtractionParams params;
  params.target_density = 0.5;
  params.epsilon = 0.01;
  CHECK_THROWS_AS(extract_exact_density_subgraph(p, params, Rng(1, 0)),
                  PreconditionError);
}

TEST_CASE("extraction output is a subgraph with exact count") {
  for (std::uint64_t seed : {3ull, 4ull, 5ull}) {
    auto p = sample_bipartite(50, 50, 0.6, Rng(seed, 0));
    ExtractionParams params;
    params.target_density = 0.3;
    params.epsilon = 0.01;
    auto out = extract_exact_density_subgraph(p, params, Rng(seed, 1));
    CHECK(out.edge_count() == 750);
    for (int x = 0; x < 50; ++x)
      for (int y : out.x_neighbors(x).to_indices()) CHECK(p.has_edge(x, y));
  }
}

TEST_CASE("extraction keeps the output quasirandom") {
  // N in {50, 100}, d0 in {0.5, 0.7}; coarse check at eps' = 10 * sqrt(eps)
  struct Cfg {
    int n;
    double d0;
  };
  for (Cfg c : {Cfg{50, 0.5}, Cfg{50, 0.7}, Cfg{100, 0.5}, Cfg{100, 0.7}}) {
    auto p = sample_bipartite(c.n, c.n, c.d0, Rng(600 + c.n, 0));
    ExtractionParams params;
    params.target_density = 0.3;
    params.epsilon = 0.01;
    auto out = extract_exact_density_subgraph(p, params, Rng(601, 0));
    CHECK(out.edge_count() ==
          static_cast<long long>(0.3 * c.n * c.n + 0.5));
    CHECK(check_eps_super_regular(out, 10.0 * std::sqrt(params.epsilon)));
  }
}
