#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "spreademb/bitset.hpp"
#include "spreademb/rng.hpp"

namespace spreademb {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CapabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Simple undirected graph on vertices 0..n-1, dense bit rows.
class Graph {
 public:
  Graph() : n_(0) {}
  explicit Graph(int n) : n_(n), rows_(n, Bitset(n)) {}

  int n() const { return n_; }

  bool adjacent(int u, int v) const { return rows_[u].test(v); }

  void add_edge(int u, int v) {
    if (u == v) throw DomainError("self-loop");
    rows_[u].set(v);
    rows_[v].set(u);
  }

  void remove_edge(int u, int v) {
    rows_[u].reset(v);
    rows_[v].reset(u);
  }

  const Bitset& neighbors(int v) const { return rows_[v]; }
  int degree(int v) const { return rows_[v].count(); }

  long long edge_count() const {
    long long s = 0;
    for (int v = 0; v < n_; ++v) s += degree(v);
    return s / 2;
  }

  std::vector<std::pair<int, int>> edges() const;

  // BFS distance, -1 if unreachable.
  int distance(int u, int v) const;

 private:
  int n_;
  std::vector<Bitset> rows_;
};

// Exact rational density: comparisons happen on the integer pair, never on
// the floating quotient.
struct ExactDensity {
  long long edges = 0;
  long long total = 0;  // |X| * |Y|
  double value() const { return total ? static_cast<double>(edges) / static_cast<double>(total) : 0.0; }
};

// Bipartite pair with ordered sides X and Y. Adjacency is stored from the X
// side; the Y side is derived. Sides carry optional labels so pairs cut out
// of a host graph remember their original vertex ids.
class BipartitePair {
 public:
  BipartitePair() : nx_(0), ny_(0) {}
  BipartitePair(int nx, int ny)
      : nx_(nx), ny_(ny), xrows_(nx, Bitset(ny)), yrows_(ny, Bitset(nx)) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }

  bool has_edge(int x, int y) const { return xrows_[x].test(y); }

  void add_edge(int x, int y) {
    xrows_[x].set(y);
    yrows_[y].set(x);
  }

  void remove_edge(int x, int y) {
    xrows_[x].reset(y);
    yrows_[y].reset(x);
  }

  const Bitset& x_neighbors(int x) const { return xrows_[x]; }
  const Bitset& y_neighbors(int y) const { return yrows_[y]; }
  int x_degree(int x) const { return xrows_[x].count(); }
  int y_degree(int y) const { return yrows_[y].count(); }

  long long edge_count() const {
    long long s = 0;
    for (int x = 0; x < nx_; ++x) s += x_degree(x);
    return s;
  }

  std::vector<int>& x_labels() { return xlabels_; }
  std::vector<int>& y_labels() { return ylabels_; }
  const std::vector<int>& x_labels() const { return xlabels_; }
  const std::vector<int>& y_labels() const { return ylabels_; }

 private:
  int nx_, ny_;
  std::vector<Bitset> xrows_;
  std::vector<Bitset> yrows_;
  std::vector<int> xlabels_, ylabels_;
};

// r classes of size N over a host graph, with a reduced graph on the classes.
// Host edges may only run between classes joined in the reduced graph.
struct ClassSystem {
  int num_classes = 0;
  int class_size = 0;
  std::vector<std::vector<int>> classes;          // host vertex ids per class
  std::vector<std::pair<int, int>> reduced_edges; // on class indices
  Graph host;

  std::vector<int> class_of;  // host vertex -> class index

  bool reduced_adjacent(int i, int j) const;
  void rebuild_class_of();
  void validate() const;  // throws DomainError on a broken invariant

  // Bit mask of class i's vertices over the host vertex set.
  Bitset class_mask(int i) const;

  // Bipartite pair between two classes (X = class i, Y = class j), labels kept.
  BipartitePair pair_between(int i, int j) const;

  // Density of the pair (i, j).
  ExactDensity pair_density(int i, int j) const;
};

ExactDensity density(const BipartitePair& pair);
int codegree(const BipartitePair& pair, int x, int xprime);

Graph sample_gnp(int n, double p, Rng rng);
BipartitePair sample_bipartite(int mx, int my, double p, Rng rng);

// Random bipartite graph with every degree exactly deg on both sides
// (union of deg random perfect matchings, resampled on collisions).
BipartitePair sample_biregular(int m, int deg, Rng rng);

// --- edge-list text format -------------------------------------------------
// One "u v" per line, 0-indexed, undirected edges listed once. Blank lines
// and '#' comments are ignored.

Graph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& g);

// Bipartite variant: header line "# bipartite nx ny"; edges are "x y" with
// x in [0,nx) and y in [0,ny).
BipartitePair read_bipartite_edge_list(std::istream& in);
void write_bipartite_edge_list(std::ostream& out, const BipartitePair& pair);

Graph load_graph(const std::string& path);
BipartitePair load_pair(const std::string& path);
void save_graph(const std::string& path, const Graph& g);
void save_pair(const std::string& path, const BipartitePair& pair);

// ClassSystem JSON: {"N":..., "classes":[[...],...], "reduced_edges":[[i,j],...],
// "host_edges":[[u,v],...]} (host edges inline; an external edge-list path is
// also accepted via "host_file").
ClassSystem load_class_system(const std::string& path);
void save_class_system(const std::string& path, const ClassSystem& sys);

}  // namespace spreademb
