#pragma once

#include <vector>

#include "spreademb/blowup.hpp"
#include "spreademb/graph.hpp"
#include "spreademb/rng.hpp"

namespace spreademb {

// Host class system over the complete reduced graph K_r: r classes of size N,
// every pair either exactly dN-biregular or G(N,N,d).
ClassSystem gen_class_system(int r, int N, double d, bool biregular, Rng rng);

// Target factor for an r=3 system: disjoint triangles (one vertex per class)
// plus one P_9^2 fragment, |W| = 2 with |W_x| = ceil(N/2).
TargetSpec gen_target_factor(const ClassSystem& sys, Rng rng);

// Host for the Hamilton-power application: a blow-up of disjoint K_4
// templates (complete between template-adjacent parts, and between parts of
// equal index across templates so the minimum degree stays high) plus a
// small universal set V0. Part sizes may differ between templates.
struct HamiltonHost {
  Graph G;
  std::vector<std::vector<int>> parts;
  std::vector<std::pair<int, int>> template_edges;
  std::vector<int> v0;
  int k = 3;
};

HamiltonHost gen_hamilton_host(const std::vector<int>& part_sizes, int v0_size,
                               Rng rng);
HamiltonHost gen_hamilton_host(int part_size, int v0_size, Rng rng,
                               int templates = 2);

}  // namespace spreademb
