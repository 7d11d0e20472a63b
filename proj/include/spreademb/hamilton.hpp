#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "spreademb/blowup.hpp"
#include "spreademb/generators.hpp"
#include "spreademb/graph.hpp"
#include "spreademb/reduced.hpp"
#include "spreademb/rng.hpp"

namespace spreademb {

// Forward cyclic distance: smallest non-negative value congruent to j - i.
inline int cyclic_forward(int i, int j, int n) { return ((j - i) % n + n) % n; }
// Unordered cyclic distance between two positions.
inline int cyclic_distance(int i, int j, int n) {
  int f = cyclic_forward(i, j, n);
  return std::min(f, n - f);
}

// 0/1 labeling of the n cycle positions, one contiguous segment per star.
// A 1-label marks a position whose image is a star center or an exceptional
// vertex; 0-labels map to leaves.
struct Blueprint {
  int n = 0;
  int k = 0;
  std::vector<int> xi;         // labels, xi[pos] in {0,1}
  std::vector<int> seg_start;  // per star, segments tile [0, n) in order
  std::vector<int> seg_len;

  int segments() const { return static_cast<int>(seg_start.size()); }
  int segment_of(int pos) const;
  bool same_segment(int i, int j) const { return segment_of(i) == segment_of(j); }
  std::vector<int> ones_in_segment(int s) const;

  // Throws DomainError on a violated invariant:
  //   - exactly ones_required[s] 1-labels per segment;
  //   - consecutive 1-labels inside a segment at distance <= k (the trailing
  //     zero block is exempt: the 1-label quota leaves k zeros per gap on
  //     average, so the spacing rule cannot also cover the segment tail);
  //   - every 1-label has a 0-label within forward distance k;
  //   - each segment starts with a 1 and ends with k-1 zeros.
  void check(const std::vector<int>& ones_required) const;
};

// Greedy labeling: leading 1, remaining 1s at even spacing <= k, trailing
// zero block. Segment s has |I_S| = (k+1) * part_size(S) + |A_S| positions
// and part_size(S) + |A_S| ones. Throws DomainError naming the segment when
// the counts are combinatorially infeasible.
Blueprint build_blueprint(const RefinedSystem& refined, int k);

struct XiGoodEmbedding {
  std::vector<int> phi;     // position -> host vertex
  std::vector<int> aprime;  // chosen A'_S positions, sorted
  const Graph* host = nullptr;
  std::vector<RunLog> star_logs;  // blow-up logs, one per star
};

// Independent four-bullet checker (separate code path from the sampler).
bool check_xi_good(const XiGoodEmbedding& emb, const Blueprint& bp,
                   const RefinedSystem& refined, const Graph& host);

// Samples a xi-good bijection: uniform A'_S positions (pairwise cyclic
// distance > 2k, rejection with an exact-count DP fallback), uniform
// bijection A'_S -> A_S, then one blow-up embedding per star with the
// neighborhoods of the placed exceptional vertices as W_x restrictions.
XiGoodEmbedding sample_xi_good(const Graph& host, const RefinedSystem& refined,
                               const Blueprint& bp, const ParamSet& params,
                               Rng rng);

// E(C^k) split under phi: hbar holds the edges guaranteed by xi-goodness
// (same segment, distance <= k, opposite labels), hphi everything else.
struct CompletionGraph {
  Graph hphi;
  Graph hbar;
  long long hphi_edges = 0;
  long long hbar_edges = 0;
};

CompletionGraph completion_graph(const XiGoodEmbedding& emb, const Blueprint& bp,
                                 int k);

// floor((2k + (v-1) * 2(k-1) - 2 * sum_{1<=i<=min(floor(v/2),k)} (k-i)) / 2).
long long count_edges_bound(int v, int k);

struct ClaimReport {
  int vmax = 0;
  std::vector<long long> max_edges;      // index v, 1..vmax (0 unused)
  std::vector<long long> formula_bound;  // count_edges_bound(v, k)
  std::vector<long long> relaxed_bound;  // v(k-1) - (k-1)
  bool formula_ok = true;
  bool relaxed_ok = true;
  long long subgraphs_seen = 0;
};

// Enumerates every connected vertex set of hphi with <= vmax vertices and
// records the maximum induced edge count per size.
ClaimReport check_claim_count_edge(const CompletionGraph& comp, int k, int vmax);

using XiGoodSampler = std::function<XiGoodEmbedding(Rng)>;

struct DecayReport {
  long long samples = 0;
  long long failures = 0;
  std::vector<long long> counts;  // |probe cap E(H_phi)| == t, t = 0..tmax
  std::vector<double> freq;
  std::vector<double> ref_log;  // t * log(C'/n) / (k-1), C' fitted at t=1
  double c_prime = 0.0;
  bool partial = false;  // all-zero tail beyond the observed support
};

DecayReport estimate_edge_spread(const XiGoodSampler& sampler,
                                 const std::vector<std::pair<int, int>>& probe,
                                 const Blueprint& bp, int tmax,
                                 long long samples, Rng rng);

struct TrialOutcome {
  int tries_used = 0;
  bool success = false;
  int sampler_failures = 0;
};

// One perturbed-graph trial: G(n,p) sampled once, then up to phi_tries
// independent xi-good draws; success as soon as every C^k edge lies in
// G u G(n,p) under the drawn bijection. Finitely many draws lower-bound the
// union event over the whole xi-good law; they do not equal it.
TrialOutcome perturbed_trial(const Graph& G, const RefinedSystem& refined,
                             const Blueprint& bp, const ParamSet& params,
                             double p, int phi_tries, Rng rng);

// True iff {phi[i], phi[i + delta mod n]} is a host edge for every position i
// and every 1 <= delta <= k.
bool verify_power_ham(const Graph& host, const std::vector<int>& phi, int k);

// Fixture plumbing: the two K_{1,3} stars of a generated Hamilton host as a
// refined system, exceptional vertices assigned by assign_exceptional.
RefinedSystem hamilton_refined(const HamiltonHost& host);

// Parameter chain for the per-star embeddings of the Hamilton application:
// the host is complete between star parts (d = 1) and the segment graph has
// maximum degree 2(k-1).
ParamSet hamilton_params(int k = 3);

}  // namespace spreademb
