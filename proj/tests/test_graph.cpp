#include "doctest.h"

#include <sstream>

#include "spreademb/graph.hpp"

using namespace spreademb;

namespace {

BipartitePair complete_pair(int mx, int my) {
  BipartitePair p(mx, my);
  for (int x = 0; x < mx; ++x)
    for (int y = 0; y < my; ++y) p.add_edge(x, y);
  return p;
}

BipartitePair matching_pair(int m) {
  BipartitePair p(m, m);
  for (int i = 0; i < m; ++i) p.add_edge(i, i);
  return p;
}

}  // namespace

TEST_CASE("density basics") {
  CHECK(density(complete_pair(3, 3)).value() == doctest::Approx(1.0));
  CHECK(density(BipartitePair(4, 5)).value() == doctest::Approx(0.0));

  BipartitePair p(2, 2);
  p.add_edge(0, 0);
  p.add_edge(0, 1);
  p.add_edge(1, 0);
  auto d = density(p);
  CHECK(d.edges == 3);
  CHECK(d.total == 4);
  CHECK(d.value() == doctest::Approx(0.75));

  CHECK_THROWS_AS(density(BipartitePair(0, 3)), DomainError);
}

TEST_CASE("density times sides equals edge count exactly") {
  Rng rng(11, 0);
  for (int t = 0; t < 20; ++t) {
    auto p = sample_bipartite(7, 9, 0.4, rng.split("p", t));
    auto d = density(p);
    CHECK(d.edges == p.edge_count());
    CHECK(d.total == 63);
  }
}

TEST_CASE("codegree") {
  auto k44 = complete_pair(4, 4);
  CHECK(codegree(k44, 0, 3) == 4);
  CHECK(codegree(k44, 2, 2) == 4);

  auto pm = matching_pair(4);
  CHECK(codegree(pm, 0, 1) == 0);
  CHECK(codegree(pm, 2, 2) == 1);

  CHECK_THROWS_AS(codegree(pm, -1, 0), DomainError);
  CHECK_THROWS_AS(codegree(pm, 0, 4), DomainError);

  // symmetry
  Rng rng(3, 0);
  auto p = sample_bipartite(8, 8, 0.5, rng);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) CHECK(codegree(p, a, b) == codegree(p, b, a));
}

TEST_CASE("degree sums match edge count on both sides") {
  Rng rng(5, 0);
  auto p = sample_bipartite(10, 12, 0.3, rng);
  long long sx = 0, sy = 0;
  for (int x = 0; x < 10; ++x) sx += p.x_degree(x);
  for (int y = 0; y < 12; ++y) sy += p.y_degree(y);
  CHECK(sx == p.edge_count());
  CHECK(sy == p.edge_count());
}

TEST_CASE("sample_gnp endpoints and reproducibility") {
  Rng rng(42, 7);
  CHECK(sample_gnp(10, 0.0, rng).edge_count() == 0);
  CHECK(sample_gnp(10, 1.0, rng).edge_count() == 45);
  CHECK_THROWS_AS(sample_gnp(5, 1.5, rng), DomainError);

  auto g1 = sample_gnp(100, 0.5, Rng(42, 7));
  auto g2 = sample_gnp(100, 0.5, Rng(42, 7));
  CHECK(g1.edges() == g2.edges());

  // mean 2475, sd = sqrt(4950 * 0.25) ~ 35.2; four sigma band
  double e = static_cast<double>(g1.edge_count());
  CHECK(e > 2475 - 4 * 35.2);
  CHECK(e < 2475 + 4 * 35.2);
}

TEST_CASE("sample_bipartite endpoints") {
  Rng rng(1, 1);
  CHECK(sample_bipartite(3, 5, 1.0, rng).edge_count() == 15);
  CHECK(sample_bipartite(3, 5, 0.0, rng).edge_count() == 0);
}

TEST_CASE("sample_biregular has exact degrees") {
  auto p = sample_biregular(20, 7, Rng(9, 0));
  for (int x = 0; x < 20; ++x) CHECK(p.x_degree(x) == 7);
  for (int y = 0; y < 20; ++y) CHECK(p.y_degree(y) == 7);
}

TEST_CASE("edge list round trip") {
  Rng rng(8, 0);
  auto g = sample_gnp(30, 0.2, rng);
  std::stringstream ss;
  write_edge_list(ss, g);
  auto g2 = read_edge_list(ss);
  CHECK(g.edges() == g2.edges());

  std::stringstream bad("# comment only\n\n");
  auto empty = read_edge_list(bad);
  CHECK(empty.n() == 0);
}

TEST_CASE("bipartite edge list round trip") {
  auto p = sample_bipartite(6, 9, 0.5, Rng(4, 4));
  std::stringstream ss;
  write_bipartite_edge_list(ss, p);
  auto p2 = read_bipartite_edge_list(ss);
  CHECK(p2.nx() == 6);
  CHECK(p2.ny() == 9);
  CHECK(p.edge_count() == p2.edge_count());
  for (int x = 0; x < 6; ++x)
    for (int y = 0; y < 9; ++y) CHECK(p.has_edge(x, y) == p2.has_edge(x, y));
}

TEST_CASE("graph distance") {
  Graph g(6);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  CHECK(g.distance(0, 3) == 3);
  CHECK(g.distance(0, 0) == 0);
  CHECK(g.distance(0, 5) == -1);
  CHECK_THROWS_AS(g.add_edge(2, 2), DomainError);
}

TEST_CASE("class system validation") {
  ClassSystem sys;
  sys.num_classes = 2;
  sys.class_size = 2;
  sys.classes = {{0, 1}, {2, 3}};
  sys.reduced_edges = {{0, 1}};
  sys.host = Graph(4);
  sys.host.add_edge(0, 2);
  sys.host.add_edge(1, 3);
  sys.rebuild_class_of();
  CHECK_NOTHROW(sys.validate());

  sys.host.add_edge(0, 1);  // within-class edge
  CHECK_THROWS_AS(sys.validate(), DomainError);
}
