#include "spreademb/generators.hpp"

#include <algorithm>

namespace spreademb {

ClassSystem gen_class_system(int r, int N, double d, bool biregular, Rng rng) {
  if (r < 2 || N < 1) throw DomainError("gen_class_system: bad sizes");
  if (d < 0.0 || d > 1.0) throw DomainError("gen_class_system: bad density");
  ClassSystem sys;
  sys.num_classes = r;
  sys.class_size = N;
  sys.host = Graph(r * N);
  sys.classes.resize(r);
  for (int i = 0; i < r; ++i) {
    sys.classes[i].resize(N);
    for (int v = 0; v < N; ++v) sys.classes[i][v] = i * N + v;
  }
  int pair_idx = 0;
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j, ++pair_idx) {
      sys.reduced_edges.emplace_back(i, j);
      Rng sub = rng.split("pair", pair_idx);
      BipartitePair p =
          biregular
              ? sample_biregular(N, static_cast<int>(d * N + 0.5), sub)
              : sample_bipartite(N, N, d, sub);
      for (int a = 0; a < N; ++a)
        for (int b : p.x_neighbors(a).to_indices())
          sys.host.add_edge(sys.classes[i][a], sys.classes[j][b]);
    }
  sys.rebuild_class_of();
  sys.validate();
  return sys;
}

TargetSpec gen_target_factor(const ClassSystem& sys, Rng rng) {
  if (sys.num_classes != 3) throw DomainError("gen_target_factor: need r = 3");
  int N = sys.class_size;
  if (3 * N < 12) throw DomainError("gen_target_factor: classes too small");
  int n = 3 * N;
  int frag = 9;                 // one squared-path fragment on 9 vertices
  int triangles = (n - frag) / 3;
  TargetSpec spec;
  spec.H = Graph(n);
  spec.h.assign(n, -1);
  for (int t = 0; t < triangles; ++t) {
    int base = 3 * t;
    for (int c = 0; c < 3; ++c) spec.h[base + c] = c;
    spec.H.add_edge(base, base + 1);
    spec.H.add_edge(base, base + 2);
    spec.H.add_edge(base + 1, base + 2);
  }
  int f0 = 3 * triangles;
  for (int i = 0; i < frag; ++i) {
    spec.h[f0 + i] = i % 3;
    if (i >= 1) spec.H.add_edge(f0 + i - 1, f0 + i);
    if (i >= 2) spec.H.add_edge(f0 + i - 2, f0 + i);
  }
  // Two restricted vertices in distinct triangles, half the class allowed.
  int half = (N + 1) / 2;
  int w_idx = 0;
  for (int x : {0, 4}) {
    spec.W.push_back(x);
    std::vector<int> cls = sys.classes[spec.h[x]];
    rng.split("wx", w_idx++).shuffle(cls);
    cls.resize(half);
    std::sort(cls.begin(), cls.end());
    spec.Wx[x] = cls;
  }
  return spec;
}

HamiltonHost gen_hamilton_host(const std::vector<int>& part_sizes, int v0_size,
                               Rng rng) {
  int templates = static_cast<int>(part_sizes.size());
  if (templates < 1 || v0_size < 0)
    throw DomainError("gen_hamilton_host: bad sizes");
  for (int s : part_sizes)
    if (s < 1) throw DomainError("gen_hamilton_host: bad sizes");
  HamiltonHost out;
  out.k = 3;
  int nparts = 4 * templates;
  int covered = 0;
  for (int s : part_sizes) covered += 4 * s;
  int n = covered + v0_size;
  out.G = Graph(n);
  std::vector<int> ids(covered);
  for (int i = 0; i < covered; ++i) ids[i] = i;
  rng.split("parts").shuffle(ids);
  out.parts.resize(nparts);
  int at = 0;
  for (int t = 0; t < templates; ++t)
    for (int a = 0; a < 4; ++a) {
      out.parts[4 * t + a].assign(ids.begin() + at,
                                  ids.begin() + at + part_sizes[t]);
      at += part_sizes[t];
    }
  for (int t = 0; t < templates; ++t)
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        out.template_edges.emplace_back(4 * t + a, 4 * t + b);
  for (auto [p, q] : out.template_edges)
    for (int u : out.parts[p])
      for (int v : out.parts[q]) out.G.add_edge(u, v);
  // Same-index parts across templates are joined completely; this keeps the
  // minimum degree well above (1/(k+1) + alpha) n without touching any
  // star-internal structure.
  for (int a = 0; a < 4; ++a)
    for (int t = 0; t < templates; ++t)
      for (int t2 = t + 1; t2 < templates; ++t2)
        for (int u : out.parts[4 * t + a])
          for (int v : out.parts[4 * t2 + a]) out.G.add_edge(u, v);
  for (int i = 0; i < v0_size; ++i) {
    int v = covered + i;
    out.v0.push_back(v);
    for (int u = 0; u < n; ++u)
      if (u != v) out.G.add_edge(u, v);
  }
  return out;
}

HamiltonHost gen_hamilton_host(int part_size, int v0_size, Rng rng,
                               int templates) {
  if (templates < 1) throw DomainError("gen_hamilton_host: bad sizes");
  return gen_hamilton_host(std::vector<int>(templates, part_size), v0_size,
                           std::move(rng));
}

}  // namespace spreademb
