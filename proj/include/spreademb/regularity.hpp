#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spreademb/graph.hpp"
#include "spreademb/rng.hpp"

namespace spreademb {

// Subset pair witnessing an epsilon-regularity violation.
struct IrregularityWitness {
  std::vector<int> xs;  // subset of X
  std::vector<int> ys;  // subset of Y
  ExactDensity sub_density;
  ExactDensity pair_density;
};

struct RegularityVerdict {
  std::uint64_t stat = 0;       // codegree second-moment sum S
  double threshold = 0.0;       // d^4 |X|^2 |Y|^2 + xi |X|^2 |Y|^2 (report only)
  bool pass = false;            // exact integer comparison, not the double
  std::optional<IrregularityWitness> witness;
};

// S = sum over ordered pairs (x, x') in X^2 of codegree(x, x')^2.
// Guaranteed overflow-free for |X|, |Y| <= 4096.
std::uint64_t second_moment_stat(const BipartitePair& pair);

// Reference implementation, kept deliberately naive for kernel tests.
std::uint64_t second_moment_stat_serial(const BipartitePair& pair);

// Codegree second-moment criterion. Pass iff
//   S <= d^4 |X|^2 |Y|^2 + xi |X|^2 |Y|^2
// decided in exact integer arithmetic (xi taken as a rational with
// denominator 10^9).
RegularityVerdict is_quasirandom(const BipartitePair& pair, double xi, double d0);

// Searches for subsets X1, X2 with |Xi| >= eps |Ai| and
// |d(X1,X2) - d(A1,A2)| > eps. Exhaustive for |X|+|Y| <= 16; otherwise tries
// `budget` candidate pairs (degree-sorted prefixes plus random subsets).
// A nullopt result is not a proof of regularity.
std::optional<IrregularityWitness> witness_irregularity(const BipartitePair& pair,
                                                        double eps, long long budget,
                                                        Rng rng);

inline constexpr long long kDefaultWitnessBudget = 10000;

// (eps, delta)-super-regularity: min degree >= delta*N on both sides,
// quasirandom at xi = eps * d^4, and no irregularity witness found.
bool check_super_regular(const BipartitePair& pair, double eps, double delta);

// eps-super-regularity: all degrees within [(d-eps)N, (d+eps)N] plus
// quasirandomness, d the pair density.
bool check_eps_super_regular(const BipartitePair& pair, double eps);

struct ExtractionParams {
  double target_density = 0.0;     // dbar
  double epsilon = 0.0;
  double slack_constant = 8.0;     // C in d = dbar + C*eps
  int per_vertex_removal_cap = 0;  // 0 -> max(4, ceil(16 * eps * N))
};

// Sparsifies a super-regular pair down to an exact edge count
// round(dbar * N^2): probabilistic thinning at d/d0, degree repair of the
// low/high sets, then capped greedy removal to the exact target.
BipartitePair extract_exact_density_subgraph(const BipartitePair& pair,
                                             const ExtractionParams& params,
                                             Rng rng);

}  // namespace spreademb
