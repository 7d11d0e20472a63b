#include "spreademb/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace spreademb {

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < n_; ++u)
    for (int v : rows_[u].to_indices())
      if (u < v) out.emplace_back(u, v);
  return out;
}

int Graph::distance(int u, int v) const {
  if (u == v) return 0;
  std::vector<int> dist(n_, -1);
  dist[u] = 0;
  std::deque<int> q{u};
  while (!q.empty()) {
    int w = q.front();
    q.pop_front();
    for (int x : rows_[w].to_indices()) {
      if (dist[x] < 0) {
        dist[x] = dist[w] + 1;
        if (x == v) return dist[x];
        q.push_back(x);
      }
    }
  }
  return -1;
}

bool ClassSystem::reduced_adjacent(int i, int j) const {
  for (auto [a, b] : reduced_edges)
    if ((a == i && b == j) || (a == j && b == i)) return true;
  return false;
}

void ClassSystem::rebuild_class_of() {
  class_of.assign(host.n(), -1);
  for (int i = 0; i < static_cast<int>(classes.size()); ++i)
    for (int v : classes[i]) class_of[v] = i;
}

Bitset ClassSystem::class_mask(int i) const {
  Bitset b(host.n());
  for (int v : classes[i]) b.set(v);
  return b;
}

void ClassSystem::validate() const {
  if (static_cast<int>(classes.size()) != num_classes)
    throw DomainError("class count mismatch");
  std::vector<int> seen(host.n(), 0);
  for (const auto& cls : classes) {
    if (static_cast<int>(cls.size()) != class_size)
      throw DomainError("class size mismatch");
    for (int v : cls) {
      if (v < 0 || v >= host.n() || seen[v]++)
        throw DomainError("classes not disjoint or out of range");
    }
  }
  std::vector<int> cof(host.n(), -1);
  for (int i = 0; i < num_classes; ++i)
    for (int v : classes[i]) cof[v] = i;
  for (auto [u, v] : host.edges()) {
    int cu = cof[u], cv = cof[v];
    if (cu < 0 || cv < 0 || cu == cv || !reduced_adjacent(cu, cv))
      throw DomainError("host edge outside reduced structure");
  }
}

BipartitePair ClassSystem::pair_between(int i, int j) const {
  const auto& X = classes[i];
  const auto& Y = classes[j];
  BipartitePair p(static_cast<int>(X.size()), static_cast<int>(Y.size()));
  p.x_labels() = X;
  p.y_labels() = Y;
  for (int a = 0; a < p.nx(); ++a)
    for (int b = 0; b < p.ny(); ++b)
      if (host.adjacent(X[a], Y[b])) p.add_edge(a, b);
  return p;
}

ExactDensity ClassSystem::pair_density(int i, int j) const {
  BipartitePair p = pair_between(i, j);
  return density(p);
}

ExactDensity density(const BipartitePair& pair) {
  if (pair.nx() < 1 || pair.ny() < 1) throw DomainError("density: empty side");
  return {pair.edge_count(), static_cast<long long>(pair.nx()) * pair.ny()};
}

int codegree(const BipartitePair& pair, int x, int xprime) {
  if (x < 0 || x >= pair.nx() || xprime < 0 || xprime >= pair.nx())
    throw DomainError("codegree: vertex not in X");
  return pair.x_neighbors(x).and_count(pair.x_neighbors(xprime));
}

Graph sample_gnp(int n, double p, Rng rng) {
  if (p < 0.0 || p > 1.0) throw DomainError("sample_gnp: p outside [0,1]");
  Graph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) g.add_edge(u, v);
  return g;
}

BipartitePair sample_bipartite(int mx, int my, double p, Rng rng) {
  if (p < 0.0 || p > 1.0) throw DomainError("sample_bipartite: p outside [0,1]");
  BipartitePair pair(mx, my);
  for (int x = 0; x < mx; ++x)
    for (int y = 0; y < my; ++y)
      if (rng.bernoulli(p)) pair.add_edge(x, y);
  return pair;
}

BipartitePair sample_biregular(int m, int deg, Rng rng) {
  if (deg < 0 || deg > m) throw DomainError("sample_biregular: bad degree");
  BipartitePair pair(m, m);
  std::vector<int> perm(m);
  for (int d = 0; d < deg; ++d) {
    // Random matching avoiding existing edges: shuffle, then repair the
    // conflicting positions by random swaps (full resampling stalls once
    // the forbidden set gets dense).
    for (int i = 0; i < m; ++i) perm[i] = i;
    rng.shuffle(perm);
    long long attempts = 0;
    for (;;) {
      int bad = -1;
      for (int x = 0; x < m; ++x)
        if (pair.has_edge(x, perm[x])) {
          bad = x;
          break;
        }
      if (bad < 0) break;
      if (++attempts > 200000LL * m)
        throw CapabilityError("sample_biregular: stuck");
      int other = static_cast<int>(rng.next_below(m));
      if (other == bad) continue;
      if (!pair.has_edge(bad, perm[other]) && !pair.has_edge(other, perm[bad]))
        std::swap(perm[bad], perm[other]);
    }
    for (int x = 0; x < m; ++x) pair.add_edge(x, perm[x]);
  }
  return pair;
}

// --- I/O ---------------------------------------------------------------

namespace {

struct ParsedEdgeList {
  bool bipartite = false;
  int nx = 0, ny = 0, n = 0;
  std::vector<std::pair<int, int>> edges;
};

ParsedEdgeList parse_edge_list(std::istream& in) {
  ParsedEdgeList out;
  std::string line;
  int maxv = -1;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) {
      std::istringstream hs(line.substr(hash + 1));
      std::string tag;
      if (hs >> tag && tag == "bipartite") {
        hs >> out.nx >> out.ny;
        out.bipartite = true;
      }
      line.erase(hash);
    }
    std::istringstream ls(line);
    int u, v;
    if (ls >> u >> v) {
      if (u < 0 || v < 0) throw DomainError("edge list: negative vertex");
      out.edges.emplace_back(u, v);
      maxv = std::max({maxv, u, v});
    }
  }
  out.n = maxv + 1;
  return out;
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  ParsedEdgeList p = parse_edge_list(in);
  int n = p.n;
  // Allow "# n <count>" style via isolated trailing vertices? Keep minimal:
  // the vertex count is 1 + max index seen.
  Graph g(n);
  for (auto [u, v] : p.edges) g.add_edge(u, v);
  return g;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# n " << g.n() << "\n";
  for (auto [u, v] : g.edges()) out << u << " " << v << "\n";
}

BipartitePair read_bipartite_edge_list(std::istream& in) {
  ParsedEdgeList p = parse_edge_list(in);
  if (!p.bipartite) throw DomainError("missing '# bipartite nx ny' header");
  BipartitePair pair(p.nx, p.ny);
  for (auto [x, y] : p.edges) {
    if (x >= p.nx || y >= p.ny) throw DomainError("bipartite edge out of range");
    pair.add_edge(x, y);
  }
  return pair;
}

void write_bipartite_edge_list(std::ostream& out, const BipartitePair& pair) {
  out << "# bipartite " << pair.nx() << " " << pair.ny() << "\n";
  for (int x = 0; x < pair.nx(); ++x)
    for (int y : pair.x_neighbors(x).to_indices()) out << x << " " << y << "\n";
}

namespace {
std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return f;
}
std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}
}  // namespace

Graph load_graph(const std::string& path) {
  auto f = open_in(path);
  return read_edge_list(f);
}
BipartitePair load_pair(const std::string& path) {
  auto f = open_in(path);
  return read_bipartite_edge_list(f);
}
void save_graph(const std::string& path, const Graph& g) {
  auto f = open_out(path);
  write_edge_list(f, g);
}
void save_pair(const std::string& path, const BipartitePair& pair) {
  auto f = open_out(path);
  write_bipartite_edge_list(f, pair);
}

ClassSystem load_class_system(const std::string& path) {
  auto f = open_in(path);
  nlohmann::json j;
  f >> j;
  ClassSystem sys;
  sys.class_size = j.at("N").get<int>();
  sys.classes = j.at("classes").get<std::vector<std::vector<int>>>();
  sys.num_classes = static_cast<int>(sys.classes.size());
  for (const auto& e : j.at("reduced_edges"))
    sys.reduced_edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  int n = 0;
  for (const auto& cls : sys.classes)
    for (int v : cls) n = std::max(n, v + 1);
  if (j.contains("host_edges")) {
    for (const auto& e : j.at("host_edges")) {
      n = std::max({n, e.at(0).get<int>() + 1, e.at(1).get<int>() + 1});
    }
    sys.host = Graph(n);
    for (const auto& e : j.at("host_edges"))
      sys.host.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
  } else if (j.contains("host_file")) {
    std::string hp = j.at("host_file").get<std::string>();
    if (!hp.empty() && hp[0] != '/') {
      auto slash = path.find_last_of('/');
      if (slash != std::string::npos) hp = path.substr(0, slash + 1) + hp;
    }
    sys.host = load_graph(hp);
  } else {
    throw DomainError("class system: missing host_edges/host_file");
  }
  sys.rebuild_class_of();
  sys.validate();
  return sys;
}

void save_class_system(const std::string& path, const ClassSystem& sys) {
  nlohmann::json j;
  j["N"] = sys.class_size;
  j["classes"] = sys.classes;
  auto& re = j["reduced_edges"] = nlohmann::json::array();
  for (auto [a, b] : sys.reduced_edges) re.push_back({a, b});
  auto& he = j["host_edges"] = nlohmann::json::array();
  for (auto [u, v] : sys.host.edges()) he.push_back({u, v});
  auto f = open_out(path);
  f << j.dump(2) << "\n";
}

}  // namespace spreademb
