#include "spreademb/matchings.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

#include "spreademb/regularity.hpp"

namespace spreademb {

namespace {

using u128 = unsigned __int128;

u128 uniform_u128_below(Rng& rng, u128 n) {
  if (n <= 1) return 0;
  u128 limit = ~u128(0) - ~u128(0) % n;
  u128 v;
  do {
    v = (u128(rng.next_u64()) << 64) | rng.next_u64();
  } while (v >= limit);
  return v % n;
}

std::vector<std::uint32_t> adjacency_masks(const BipartitePair& pair) {
  std::vector<std::uint32_t> adj(pair.nx(), 0);
  for (int x = 0; x < pair.nx(); ++x)
    for (int y : pair.x_neighbors(x).to_indices()) adj[x] |= 1u << y;
  return adj;
}

void require_square_small(const BipartitePair& pair) {
  if (pair.nx() != pair.ny())
    throw PreconditionError("matchings: sides differ");
  if (pair.nx() > kExactMatchingLimit)
    throw CapabilityError("matchings: side exceeds exact-DP limit, use mcmc");
}

BipartitePair delete_pin(const BipartitePair& pair, int dx, int dy) {
  BipartitePair sub(pair.nx() - 1, pair.ny() - 1);
  for (int x = 0, xs = 0; x < pair.nx(); ++x) {
    if (x == dx) continue;
    for (int y : pair.x_neighbors(x).to_indices()) {
      if (y == dy) continue;
      sub.add_edge(xs, y < dy ? y : y - 1);
    }
    ++xs;
  }
  return sub;
}

}  // namespace

bool is_valid_matching(const BipartitePair& pair, const Matching& m) {
  if (static_cast<int>(m.size()) != pair.nx() || pair.nx() != pair.ny()) return false;
  std::vector<bool> used(pair.ny(), false);
  for (int x = 0; x < pair.nx(); ++x) {
    int y = m[x];
    if (y < 0 || y >= pair.ny() || used[y] || !pair.has_edge(x, y)) return false;
    used[y] = true;
  }
  return true;
}

MatchingCountTable::MatchingCountTable(const BipartitePair& pair) : m_(pair.nx()) {
  require_square_small(pair);
  adj_ = adjacency_masks(pair);
  // ways_[mask] = matchings of x_0..x_{c-1} into the Y-set `mask`,
  // c = popcount(mask). The classic permanent DP.
  ways_.assign(std::size_t(1) << m_, 0);
  ways_[0] = 1;
  for (std::uint32_t mask = 1; mask < (1u << m_); ++mask) {
    int c = std::popcount(mask);
    std::uint32_t avail = mask & adj_[c - 1];
    u128 total = 0;
    while (avail) {
      std::uint32_t y = avail & (~avail + 1);
      total += ways_[mask ^ y];
      avail ^= y;
    }
    ways_[mask] = total;
  }
}

BigInt MatchingCountTable::total() const {
  u128 t = ways_.back();
  return (BigInt(static_cast<std::uint64_t>(t >> 64)) << 64) |
         BigInt(static_cast<std::uint64_t>(t));
}

Matching MatchingCountTable::sample(Rng& rng) const {
  if (ways_.back() == 0) throw DomainError("matchings: no perfect matching");
  Matching out(m_, -1);
  std::uint32_t mask = (m_ == 32) ? ~0u : ((1u << m_) - 1);
  for (int x = m_ - 1; x >= 0; --x) {
    u128 pick = uniform_u128_below(rng, ways_[mask]);
    std::uint32_t avail = mask & adj_[x];
    u128 acc = 0;
    int chosen = -1;
    while (avail) {
      std::uint32_t ybit = avail & (~avail + 1);
      int y = std::countr_zero(ybit);
      acc += ways_[mask ^ ybit];
      if (pick < acc) {
        chosen = y;
        break;
      }
      avail ^= ybit;
    }
    out[x] = chosen;
    mask ^= 1u << chosen;
  }
  return out;
}

BigInt count_perfect_matchings(const BipartitePair& pair) {
  require_square_small(pair);
  if (pair.nx() == 0) return 1;
  return MatchingCountTable(pair).total();
}

Matching sample_uniform_matching_exact(const BipartitePair& pair, Rng rng) {
  MatchingCountTable table(pair);
  if (table.total() == 0) throw DomainError("matchings: no perfect matching");
  return table.sample(rng);
}

int maximum_matching_size(const BipartitePair& pair, Matching* out) {
  const int nx = pair.nx(), ny = pair.ny();
  std::vector<int> match_x(nx, -1), match_y(ny, -1);
  std::vector<bool> seen(ny);
  // Kuhn's algorithm; instance sizes here make this plenty.
  std::function<bool(int)> try_augment = [&](int x) -> bool {
    for (int y : pair.x_neighbors(x).to_indices()) {
      if (seen[y]) continue;
      seen[y] = true;
      if (match_y[y] < 0 || try_augment(match_y[y])) {
        match_x[x] = y;
        match_y[y] = x;
        return true;
      }
    }
    return false;
  };
  int size = 0;
  for (int x = 0; x < nx; ++x) {
    std::fill(seen.begin(), seen.end(), false);
    if (try_augment(x)) ++size;
  }
  if (out) *out = match_x;
  return size;
}

Matching sample_matching_mcmc(const BipartitePair& pair, long long steps, Rng rng) {
  if (pair.nx() != pair.ny()) throw PreconditionError("matchings: sides differ");
  if (steps < 1) throw DomainError("matchings: steps < 1");
  const int m = pair.nx();
  Matching cur;
  if (maximum_matching_size(pair, &cur) != m)
    throw DomainError("matchings: no perfect matching");
  std::vector<int> inv(m);
  for (int x = 0; x < m; ++x) inv[cur[x]] = x;
  for (long long s = 0; s < steps; ++s) {
    // Lazy alternating 4-cycle switch.
    int x1 = static_cast<int>(rng.next_below(m));
    int x2 = static_cast<int>(rng.next_below(m));
    if (x1 == x2) continue;
    int y1 = cur[x1], y2 = cur[x2];
    if (pair.has_edge(x1, y2) && pair.has_edge(x2, y1) && rng.bernoulli(0.5)) {
      cur[x1] = y2;
      cur[x2] = y1;
      inv[y1] = x2;
      inv[y2] = x1;
    }
  }
  return cur;
}

Matching sample_spread_matching(const BipartitePair& pair, double eps, double delta,
                                Rng rng) {
  if (!check_super_regular(pair, eps, delta))
    throw PreconditionError("sample_spread_matching: pair not (eps,delta)-super-regular");
  const int m = pair.nx();
  double dbar = delta / 2.0;
  ExtractionParams params;
  params.target_density = dbar;
  params.epsilon = eps;
  // Keep dbar + C*eps within both delta and the realized density; the
  // extraction slack shrinks when eps is coarse relative to delta.
  double d0 = density(pair).value();
  double cmax = std::min((delta - dbar) / eps, (d0 - dbar) / eps);
  params.slack_constant = std::min(8.0, cmax);
  BipartitePair sub = extract_exact_density_subgraph(pair, params, rng.split("extract"));
  Rng draw = rng.split("draw");
  if (m <= kExactMatchingLimit) {
    return sample_uniform_matching_exact(sub, draw);
  }
  long long steps =
      static_cast<long long>(std::ceil(50.0 * m * std::log(std::max(2, m))));
  return sample_matching_mcmc(sub, steps, draw);
}

Rational exact_pin_probability(const BipartitePair& pair, int x, int y) {
  require_square_small(pair);
  BigInt total = count_perfect_matchings(pair);
  if (total == 0) throw DomainError("matchings: no perfect matching");
  if (!pair.has_edge(x, y)) return {0, total};
  return {count_perfect_matchings(delete_pin(pair, x, y)), total};
}

Rational exact_pair_pin_probability(const BipartitePair& pair, int x1, int y1,
                                    int x2, int y2) {
  require_square_small(pair);
  BigInt total = count_perfect_matchings(pair);
  if (total == 0) throw DomainError("matchings: no perfect matching");
  if (x1 == x2 || y1 == y2) return {0, total};
  if (!pair.has_edge(x1, y1) || !pair.has_edge(x2, y2)) return {0, total};
  BipartitePair once = delete_pin(pair, x1, y1);
  int ax2 = x2 < x1 ? x2 : x2 - 1;
  int ay2 = y2 < y1 ? y2 : y2 - 1;
  return {count_perfect_matchings(delete_pin(once, ax2, ay2)), total};
}

}  // namespace spreademb
