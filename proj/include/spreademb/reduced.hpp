#pragma once

#include <map>
#include <vector>

#include "spreademb/graph.hpp"
#include "spreademb/rng.hpp"

namespace spreademb {

// Reduced graph on [m] with an optional declared minimum-degree floor.
struct ReducedGraph {
  Graph g;
  int min_degree_floor = 0;  // 0 = undeclared

  void validate() const;  // throws DomainError if a declared floor is broken
};

struct Star {
  int center = -1;
  std::vector<int> leaves;
};

// Vertex-disjoint stars covering [m], each with 1..k leaves.
struct StarPartition {
  std::vector<Star> stars;

  void check_invariants(const Graph& R, int k) const;  // throws DomainError
};

// Constructive star partition: greedy maximal matching over a seeded random
// edge order, K_{1,2} absorption of doubly-claimed unmatched vertices, and a
// max-flow assignment of the rest (capacity k-1 per matched center). Falls
// back to exhaustive search on small graphs so feasibility decisions are
// exact there.
// Throws PreconditionError on an isolated vertex, DomainError when no valid
// partition is found.
StarPartition star_partition(const ReducedGraph& R, int k, double alpha,
                             Rng rng);

// Exhaustive feasibility oracle (bitmask DP); m must be <= 20.
bool star_cover_exists(const Graph& R, int k);

// Flow sub-problem of the partition: assign every vertex of U to a neighbor
// in H, each h in H receiving at most k-1. Returns the max-flow value and,
// when owner != nullptr, the H-index owning each U vertex (-1 unassigned).
int star_flow_assign(const Graph& R, const std::vector<int>& H,
                     const std::vector<int>& U, int k,
                     std::vector<int>* owner = nullptr);

// Whether some H' subset of H and U' subset of U certify infeasibility of the
// flow sub-problem: (k-1)|H'| + e(H', U \ U') + e(H \ H', U') < |U'|.
// Exhaustive; |H| + |U| must be small.
bool star_cut_violation_exists(const Graph& R, const std::vector<int>& H,
                               const std::vector<int>& U, int k);

// Refined star system over split vertex parts. Host vertices are global ids:
// reduced vertex x owns [x*N, (x+1)*N). Parts within a star share one size;
// split leftovers go to the exceptional set.
struct RefinedSystem {
  std::vector<std::vector<int>> parts;  // part id -> host vertex ids
  std::vector<int> part_origin;         // part id -> reduced vertex
  std::vector<Star> stars;              // over part ids, all K_{1,k}
  std::vector<int> exceptional;         // V0, host vertex ids
  std::map<int, int> assignment;        // V0 vertex -> leaf part id
  int k = 0;

  bool is_center(int part) const;
  std::vector<int> leaf_parts() const;
  void check_invariants() const;  // throws DomainError
};

// Regularize a star partition to K_{1,k} stars over split parts:
//   - K_{1,k} stars keep their classes whole;
//   - K_{1,k'} with 1 < k' < k splits every class into k-1 parts, k'-1 center
//     parts take k leaf parts each (lexicographically), and the k-k' leftover
//     leaf parts pair with the k-k' unused center parts as K_{1,1};
//   - every K_{1,1} (original or leftover) splits its two parts into k+1
//     pieces: the first center piece takes leaf pieces 1..k, the last leaf
//     piece takes center pieces 2..k+1.
RefinedSystem refine_to_k_stars(const StarPartition& partition, int class_size,
                                int k);

// Assign every exceptional vertex to a leaf part where it has at least
// delta_p * |part| / 2 host neighbors, greedily by current load; per-part
// load is capped at ceil(cap_fraction * |part|) (the caller folds the
// eps / delta' constants into cap_fraction). Throws DomainError naming the
// first vertex with no eligible part or when every eligible part is full.
std::map<int, int> assign_exceptional(const Graph& host, RefinedSystem& refined,
                                      double delta_p, double cap_fraction);

}  // namespace spreademb
