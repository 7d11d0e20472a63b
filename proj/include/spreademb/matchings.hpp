#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spreademb/graph.hpp"
#include "spreademb/rng.hpp"

namespace spreademb {

using BigInt = boost::multiprecision::cpp_int;

// Perfect matching of a bipartite pair: entry x is the Y-partner of X-vertex x.
using Matching = std::vector<int>;

bool is_valid_matching(const BipartitePair& pair, const Matching& m);

inline constexpr int kExactMatchingLimit = 24;  // subset-DP size cap

// Exact permanent of the biadjacency matrix via subset DP, m <= 24.
BigInt count_perfect_matchings(const BipartitePair& pair);

// Self-reducible count table: ways to complete once a prefix of X is matched
// into the complement of a Y-subset mask. Built once, reused for exact
// sampling and pin probabilities.
class MatchingCountTable {
 public:
  explicit MatchingCountTable(const BipartitePair& pair);

  BigInt total() const;
  Matching sample(Rng& rng) const;

 private:
  int m_;
  std::vector<unsigned __int128> ways_;  // indexed by free-Y mask
  std::vector<std::uint32_t> adj_;       // X-side adjacency masks
};

// Exactly uniform over all perfect matchings (m <= 24).
Matching sample_uniform_matching_exact(const BipartitePair& pair, Rng rng);

// Switch Markov chain from a maximum-matching start; approximately uniform,
// no mixing guarantee.
Matching sample_matching_mcmc(const BipartitePair& pair, long long steps, Rng rng);

// Lemma-2.4-role sampler: extract an exact-density subgraph at dbar = delta/2,
// then sample uniformly (exact DP when m <= 24, switch chain otherwise).
Matching sample_spread_matching(const BipartitePair& pair, double eps, double delta,
                                Rng rng);

struct Rational {
  BigInt num;
  BigInt den;
  double value() const { return den == 0 ? 0.0 : num.convert_to<double>() / den.convert_to<double>(); }
};

// Pr[matching maps x to y] under the uniform perfect-matching law.
Rational exact_pin_probability(const BipartitePair& pair, int x, int y);

// Joint pin Pr[x1 -> y1 and x2 -> y2], by double deletion.
Rational exact_pair_pin_probability(const BipartitePair& pair, int x1, int y1,
                                    int x2, int y2);

// Hopcroft-Karp style maximum matching size (augmenting paths); used to test
// perfect-matching existence before running the chain.
int maximum_matching_size(const BipartitePair& pair, Matching* out = nullptr);

}  // namespace spreademb
