#include "spreademb/hamilton.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace spreademb {

int Blueprint::segment_of(int pos) const {
  for (int s = 0; s < segments(); ++s)
    if (pos >= seg_start[s] && pos < seg_start[s] + seg_len[s]) return s;
  throw DomainError("blueprint: position outside every segment");
}

std::vector<int> Blueprint::ones_in_segment(int s) const {
  std::vector<int> out;
  for (int t = 0; t < seg_len[s]; ++t)
    if (xi[seg_start[s] + t] == 1) out.push_back(seg_start[s] + t);
  return out;
}

void Blueprint::check(const std::vector<int>& ones_required) const {
  if (n <= 0 || static_cast<int>(xi.size()) != n || k < 2)
    throw DomainError("blueprint: malformed");
  if (seg_start.empty() || seg_start.size() != seg_len.size())
    throw DomainError("blueprint: malformed segments");
  int pos = 0;
  for (int s = 0; s < segments(); ++s) {
    if (seg_start[s] != pos || seg_len[s] < k)
      throw DomainError("blueprint: segments must tile the cycle");
    pos += seg_len[s];
  }
  if (pos != n) throw DomainError("blueprint: segments must tile the cycle");
  for (int v : xi)
    if (v != 0 && v != 1) throw DomainError("blueprint: label outside {0,1}");
  for (int s = 0; s < segments(); ++s) {
    const auto ones = ones_in_segment(s);
    std::ostringstream where;
    where << "segment " << s;
    if (!ones_required.empty() &&
        static_cast<int>(ones.size()) != ones_required[s])
      throw DomainError("blueprint: wrong 1-count in " + where.str());
    if (xi[seg_start[s]] != 1)
      throw DomainError("blueprint: " + where.str() + " does not start with 1");
    for (int t = seg_len[s] - k + 1; t < seg_len[s]; ++t)
      if (xi[seg_start[s] + t] != 0)
        throw DomainError("blueprint: " + where.str() +
                          " does not end with k-1 zeros");
    for (std::size_t a = 1; a < ones.size(); ++a)
      if (ones[a] - ones[a - 1] > k)
        throw DomainError("blueprint: 1-labels too far apart in " + where.str());
  }
  for (int i = 0; i < n; ++i) {
    if (xi[i] != 1) continue;
    bool zero_near = false;
    for (int delta = 1; delta <= k && !zero_near; ++delta)
      zero_near = xi[(i + delta) % n] == 0;
    if (!zero_near)
      throw DomainError("blueprint: no 0 within distance k of a 1-label");
  }
}

Blueprint build_blueprint(const RefinedSystem& refined, int k) {
  if (k < 2) throw PreconditionError("blueprint: k < 2");
  refined.check_invariants();
  std::vector<int> part2star(refined.parts.size(), -1);
  for (std::size_t s = 0; s < refined.stars.size(); ++s) {
    part2star[refined.stars[s].center] = static_cast<int>(s);
    for (int l : refined.stars[s].leaves) part2star[l] = static_cast<int>(s);
  }
  std::vector<int> a_count(refined.stars.size(), 0);
  for (const auto& [v, p] : refined.assignment) ++a_count[part2star[p]];

  Blueprint bp;
  bp.k = k;
  std::vector<int> ones_required;
  int pos = 0;
  for (std::size_t s = 0; s < refined.stars.size(); ++s) {
    const int Ns = static_cast<int>(refined.parts[refined.stars[s].center].size());
    const int L = (k + 1) * Ns + a_count[s];
    const int m1 = Ns + a_count[s];
    bp.seg_start.push_back(pos);
    bp.seg_len.push_back(L);
    ones_required.push_back(m1);
    if (m1 < 1 || m1 > L - k + 1) {
      std::ostringstream msg;
      msg << "blueprint: infeasible 1-count " << m1 << " for segment " << s
          << " of length " << L;
      throw DomainError(msg.str());
    }
    bp.xi.resize(pos + L, 0);
    if (m1 == 1) {
      bp.xi[pos] = 1;
    } else {
      // Even 1-spacing with every gap <= k; the trailing zero block absorbs
      // whatever the 1-count cannot reach. Gaps come out as floor/ceil of
      // last/G, interleaved.
      const long long G = m1 - 1;
      const long long last = std::min<long long>(G * k, L - k);
      for (long long i = 0; i <= G; ++i)
        bp.xi[pos + static_cast<int>(i * last / G)] = 1;
    }
    pos += L;
  }
  bp.n = pos;
  bp.check(ones_required);
  return bp;
}

namespace {

struct OnePositions {
  std::vector<int> pos;   // global position of each 1-label, ascending
  std::vector<int> seg;   // its segment
};

bool aprime_spacing_ok(const std::vector<int>& chosen, int n, int k) {
  if (chosen.size() < 2) return true;
  for (std::size_t a = 1; a < chosen.size(); ++a)
    if (chosen[a] - chosen[a - 1] <= 2 * k) return false;
  return n - (chosen.back() - chosen.front()) > 2 * k;
}

// Exact count of admissible completions: positions P[idx..] still available,
// per-segment quotas `rem` (earlier segments must already be settled),
// last chosen index `lastIdx`, positions capped at `cap` (wrap constraint,
// fixed once the first chosen position is known).
struct AprimeDp {
  const OnePositions& P;
  int k;
  int cap;
  std::vector<int> rem;
  std::unordered_map<long long, long long> memo;

  long long count(int idx, int lastIdx) {
    const int m = static_cast<int>(P.pos.size());
    if (idx == m) {
      for (int r : rem)
        if (r) return 0;
      return 1;
    }
    if (idx > 0 && P.seg[idx] != P.seg[idx - 1] && rem[P.seg[idx - 1]] > 0)
      return 0;
    const bool gap_ok =
        lastIdx < 0 || P.pos[idx] - P.pos[lastIdx] > 2 * k;
    // lastIdx only matters while it can still block a pick
    const int last_key = gap_ok ? -1 : lastIdx;
    const long long key =
        (static_cast<long long>(idx) * (m + 2) + (last_key + 1)) * 64 +
        rem[P.seg[idx]];
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    long long r = count(idx + 1, lastIdx);
    if (rem[P.seg[idx]] > 0 && P.pos[idx] <= cap && gap_ok) {
      --rem[P.seg[idx]];
      r += count(idx + 1, idx);
      ++rem[P.seg[idx]];
    }
    memo[key] = r;
    return r;
  }
};

std::vector<int> sample_aprime(const Blueprint& bp, const std::vector<int>& need,
                               Rng rng) {
  OnePositions P;
  for (int s = 0; s < bp.segments(); ++s)
    for (int p : bp.ones_in_segment(s)) {
      P.pos.push_back(p);
      P.seg.push_back(s);
    }
  int total = 0;
  for (int s = 0; s < bp.segments(); ++s) {
    total += need[s];
    const int avail = static_cast<int>(bp.ones_in_segment(s).size());
    if (need[s] > avail) {
      std::ostringstream msg;
      msg << "aprime: segment " << s << " has " << avail
          << " 1-labels but needs " << need[s];
      throw DomainError(msg.str());
    }
  }
  if (total == 0) return {};

  // Rejection: uniform per-segment subsets, accept on the spacing constraint.
  const int kRejectionBudget = 10000;
  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    Rng arng = rng.split("attempt", attempt);
    std::vector<int> chosen;
    for (int s = 0; s < bp.segments(); ++s) {
      std::vector<int> ones = bp.ones_in_segment(s);
      for (int t = 0; t < need[s]; ++t) {
        int j = t + static_cast<int>(arng.next_below(ones.size() - t));
        std::swap(ones[t], ones[j]);
        chosen.push_back(ones[t]);
      }
    }
    std::sort(chosen.begin(), chosen.end());
    if (aprime_spacing_ok(chosen, bp.n, bp.k)) return chosen;
  }

  // Exact fallback: condition on the first chosen position, then walk the
  // remaining 1-labels left to right with conditional take/skip counts.
  AprimeDp dp{P, bp.k, 0, need, {}};
  const int m = static_cast<int>(P.pos.size());
  std::vector<long long> first_weight(m, 0);
  long long grand = 0;
  for (int f = 0; f < m; ++f) {
    bool earlier_quota = false;
    for (int s = 0; s < P.seg[f]; ++s) earlier_quota |= need[s] > 0;
    if (earlier_quota || need[P.seg[f]] == 0) continue;
    dp.cap = total >= 2 ? P.pos[f] + bp.n - 2 * bp.k - 1 : bp.n;
    dp.rem = need;
    --dp.rem[P.seg[f]];
    dp.memo.clear();
    first_weight[f] = dp.count(f + 1, f);
    grand += first_weight[f];
  }
  if (grand == 0) throw EmbedFailure("aprime: no admissible choice", "aprime");
  long long pick = static_cast<long long>(rng.next_below(grand));
  int f = 0;
  while (pick >= first_weight[f]) pick -= first_weight[f++];
  dp.cap = total >= 2 ? P.pos[f] + bp.n - 2 * bp.k - 1 : bp.n;
  dp.rem = need;
  --dp.rem[P.seg[f]];
  dp.memo.clear();
  std::vector<int> chosen{P.pos[f]};
  int last = f;
  for (int idx = f + 1; idx < m; ++idx) {
    if (idx > 0 && P.seg[idx] != P.seg[idx - 1] && dp.rem[P.seg[idx - 1]] > 0)
      break;  // count() would be zero; cannot happen on a valid walk
    long long take = 0;
    const bool gap_ok = P.pos[idx] - P.pos[last] > 2 * bp.k;
    if (dp.rem[P.seg[idx]] > 0 && P.pos[idx] <= dp.cap && gap_ok) {
      --dp.rem[P.seg[idx]];
      take = dp.count(idx + 1, idx);
      ++dp.rem[P.seg[idx]];
    }
    const long long skip = dp.count(idx + 1, last);
    const long long tot = take + skip;
    if (tot == 0) throw EmbedFailure("aprime: conditional walk stuck", "aprime");
    if (static_cast<long long>(rng.next_below(tot)) < take) {
      --dp.rem[P.seg[idx]];
      chosen.push_back(P.pos[idx]);
      last = idx;
    }
  }
  if (static_cast<int>(chosen.size()) != total || !aprime_spacing_ok(chosen, bp.n, bp.k))
    throw EmbedFailure("aprime: conditional walk produced an invalid set", "aprime");
  return chosen;
}

}  // namespace

XiGoodEmbedding sample_xi_good(const Graph& host, const RefinedSystem& refined,
                               const Blueprint& bp, const ParamSet& params,
                               Rng rng) {
  refined.check_invariants();
  const int k = refined.k;
  const int n = bp.n;
  if (bp.k != k) throw PreconditionError("xi-good: blueprint k mismatch");
  if (n != host.n())
    throw PreconditionError("xi-good: blueprint length differs from host order");
  if (refined.assignment.size() != refined.exceptional.size())
    throw PreconditionError("xi-good: unassigned exceptional vertex");
  if (static_cast<int>(refined.stars.size()) != bp.segments())
    throw PreconditionError("xi-good: segment / star count mismatch");

  const int S = bp.segments();
  std::vector<int> part2star(refined.parts.size(), -1);
  for (int s = 0; s < S; ++s) {
    part2star[refined.stars[s].center] = s;
    for (int l : refined.stars[s].leaves) part2star[l] = s;
  }
  std::vector<std::vector<int>> A(S);  // exceptional vertices per star
  std::vector<int> need(S, 0);
  for (const auto& [v, p] : refined.assignment) {
    A[part2star[p]].push_back(v);
    ++need[part2star[p]];
  }
  {
    std::vector<int> ones_required(S);
    for (int s = 0; s < S; ++s)
      ones_required[s] =
          static_cast<int>(refined.parts[refined.stars[s].center].size()) +
          need[s];
    bp.check(ones_required);
  }

  XiGoodEmbedding emb;
  emb.host = &host;
  emb.phi.assign(n, -1);
  emb.aprime = sample_aprime(bp, need, rng.split("aprime"));
  std::vector<char> is_aprime(n, 0);
  for (int p : emb.aprime) is_aprime[p] = 1;

  // Uniform bijection A'_S -> A_S per star.
  for (int s = 0; s < S; ++s) {
    std::vector<int> slots;
    for (int p : emb.aprime)
      if (bp.segment_of(p) == s) slots.push_back(p);
    std::vector<int> vs = A[s];
    rng.split("bijection", s).shuffle(vs);
    for (std::size_t t = 0; t < slots.size(); ++t) emb.phi[slots[t]] = vs[t];
  }

  // One blow-up embedding per star.
  for (int s = 0; s < S; ++s) {
    const Star& st = refined.stars[s];
    const int Ns = static_cast<int>(refined.parts[st.center].size());
    std::vector<int> part_ids{st.center};
    for (int l : st.leaves) part_ids.push_back(l);

    ClassSystem sys;
    sys.num_classes = k + 1;
    sys.class_size = Ns;
    sys.host = Graph((k + 1) * Ns);
    sys.classes.resize(k + 1);
    std::vector<int> loc2glob((k + 1) * Ns);
    for (int c = 0; c <= k; ++c) {
      sys.classes[c].resize(Ns);
      for (int i = 0; i < Ns; ++i) {
        sys.classes[c][i] = c * Ns + i;
        loc2glob[c * Ns + i] = refined.parts[part_ids[c]][i];
      }
    }
    // The host template is complete between every pair of its parts, so the
    // local reduced graph is all of K_{k+1}, not just the star: the extra
    // pairs give preprocessing room to augment buffer degrees between leaves.
    for (int c = 0; c <= k; ++c)
      for (int c2 = c + 1; c2 <= k; ++c2) {
        sys.reduced_edges.emplace_back(c, c2);
        for (int a = 0; a < Ns; ++a)
          for (int b = 0; b < Ns; ++b)
            if (host.adjacent(loc2glob[c * Ns + a], loc2glob[c2 * Ns + b]))
              sys.host.add_edge(c * Ns + a, c2 * Ns + b);
      }
    sys.rebuild_class_of();
    sys.validate();

    const int base = bp.seg_start[s];
    const int L = bp.seg_len[s];
    std::vector<int> hid(L, -1);
    int hcount = 0;
    for (int t = 0; t < L; ++t)
      if (!is_aprime[base + t]) hid[t] = hcount++;
    if (hcount != (k + 1) * Ns)
      throw DomainError("xi-good: homomorphism balancing failure (size)");

    // forced leaf classes next to A'_S picks
    std::vector<int> forced_cls(L, -1), forced_v0(L, -1);
    for (int p : emb.aprime) {
      if (bp.segment_of(p) != s) continue;
      const int v0 = emb.phi[p];
      const int p0 = refined.assignment.at(v0);
      int c0 = -1;
      for (int c = 1; c <= k; ++c)
        if (part_ids[c] == p0) c0 = c;
      if (c0 < 0)
        throw DomainError("xi-good: exceptional vertex assigned outside its star");
      for (int delta = -k; delta <= k; ++delta) {
        if (delta == 0) continue;
        const int i = ((p + delta) % n + n) % n;
        if (bp.segment_of(i) != s || bp.xi[i] != 0) continue;
        if (forced_cls[i - base] != -1)
          throw DomainError("xi-good: A' picks closer than 2k");
        forced_cls[i - base] = c0;
        forced_v0[i - base] = v0;
      }
    }

    TargetSpec spec;
    spec.H = Graph(hcount);
    spec.h.assign(hcount, -1);
    std::vector<int> quota(k + 1, Ns);
    for (int t = 0; t < L; ++t) {
      if (hid[t] < 0) continue;
      int cls = -1;
      if (bp.xi[base + t] == 1)
        cls = 0;
      else if (forced_cls[t] != -1)
        cls = forced_cls[t];
      if (cls >= 0) {
        if (--quota[cls] < 0)
          throw DomainError("xi-good: homomorphism balancing failure (quota)");
        spec.h[hid[t]] = cls;
      }
    }
    int rr = 1;
    for (int t = 0; t < L; ++t) {
      if (hid[t] < 0 || spec.h[hid[t]] >= 0) continue;
      while (quota[rr] == 0) rr = rr % k + 1;
      --quota[rr];
      spec.h[hid[t]] = rr;
      rr = rr % k + 1;
    }

    for (int t = 0; t < L; ++t) {
      if (hid[t] < 0) continue;
      for (int delta = 1; delta <= k; ++delta) {
        const int j = (base + t + delta) % n;
        if (bp.segment_of(j) != s || is_aprime[j]) continue;
        if (bp.xi[base + t] != bp.xi[j])
          spec.H.add_edge(hid[t], hid[j - base]);
      }
    }

    for (int t = 0; t < L; ++t) {
      if (forced_v0[t] < 0 || hid[t] < 0) continue;
      const int c0 = forced_cls[t];
      std::vector<int> allowed;
      for (int i = 0; i < Ns; ++i)
        if (host.adjacent(loc2glob[c0 * Ns + i], forced_v0[t]))
          allowed.push_back(c0 * Ns + i);
      if (static_cast<int>(allowed.size()) == Ns) continue;  // no restriction
      spec.W.push_back(hid[t]);
      spec.Wx[hid[t]] = allowed;
    }

#ifdef XI_DEBUG
    {
      int mx = 0, arg = -1;
      for (int x = 0; x < spec.H.n(); ++x)
        if (spec.H.degree(x) > mx) { mx = spec.H.degree(x); arg = x; }
      if (mx > params.Delta) {
        std::fprintf(stderr, "star %d: max H degree %d at local %d; A':", s, mx, arg);
        for (int a : emb.aprime) std::fprintf(stderr, " %d", a);
        std::fprintf(stderr, "\n");
        for (int t = 0; t < L; ++t)
          if (hid[t] == arg)
            std::fprintf(stderr, "  local %d = position %d (xi=%d)\n", arg, base + t, bp.xi[base + t]);
      }
    }
#endif
    EmbedResult res = embed(spec, sys, params, rng.split("embed", s));
    for (int t = 0; t < L; ++t)
      if (hid[t] >= 0) emb.phi[base + t] = loc2glob[res.phi[hid[t]]];
    emb.star_logs.push_back(res.log);
  }

  if (!check_xi_good(emb, bp, refined, host))
    throw DomainError("xi-good: sampled embedding rejected by the checker");
  return emb;
}

bool check_xi_good(const XiGoodEmbedding& emb, const Blueprint& bp,
                   const RefinedSystem& refined, const Graph& host) {
  const int n = bp.n;
  const int k = bp.k;
  if (static_cast<int>(emb.phi.size()) != n || host.n() != n) return false;
  {
    std::vector<char> seen(n, 0);
    for (int v : emb.phi) {
      if (v < 0 || v >= n || seen[v]) return false;
      seen[v] = 1;
    }
  }
  std::vector<int> part2star(refined.parts.size(), -1);
  for (std::size_t s = 0; s < refined.stars.size(); ++s) {
    part2star[refined.stars[s].center] = static_cast<int>(s);
    for (int l : refined.stars[s].leaves) part2star[l] = static_cast<int>(s);
  }
  for (int s = 0; s < bp.segments(); ++s) {
    const Star& st = refined.stars[s];
    // A_S u Z_S membership per host vertex, plus the full V_S u A_S image set
    std::vector<char> in_img(n, 0), in_az(n, 0);
    for (int v : refined.parts[st.center]) in_img[v] = in_az[v] = 1;
    for (int l : st.leaves)
      for (int v : refined.parts[l]) in_img[v] = 1;
    for (const auto& [v, p] : refined.assignment)
      if (part2star[p] == s) in_img[v] = in_az[v] = 1;
    for (int t = 0; t < bp.seg_len[s]; ++t) {
      const int v = emb.phi[bp.seg_start[s] + t];
      if (!in_img[v]) return false;
      if ((bp.xi[bp.seg_start[s] + t] == 1) != (in_az[v] == 1)) return false;
    }
  }
  {
    std::vector<int> v0pos;
    std::vector<int> inv(n, -1);
    for (int i = 0; i < n; ++i) inv[emb.phi[i]] = i;
    for (int v : refined.exceptional) v0pos.push_back(inv[v]);
    for (std::size_t a = 0; a < v0pos.size(); ++a)
      for (std::size_t b = a + 1; b < v0pos.size(); ++b)
        if (cyclic_distance(v0pos[a], v0pos[b], n) <= 2 * k) return false;
  }
  for (int i = 0; i < n; ++i)
    for (int delta = 1; delta <= k; ++delta) {
      const int j = (i + delta) % n;
      if (!bp.same_segment(i, j) || bp.xi[i] == bp.xi[j]) continue;
      if (!host.adjacent(emb.phi[i], emb.phi[j])) return false;
    }
  return true;
}

CompletionGraph completion_graph(const XiGoodEmbedding& emb, const Blueprint& bp,
                                 int k) {
  if (k != bp.k) throw PreconditionError("completion: k differs from blueprint");
  const int n = bp.n;
  if (n <= 2 * k) throw PreconditionError("completion: need n > 2k");
  if (static_cast<int>(emb.phi.size()) != n)
    throw PreconditionError("completion: phi size mismatch");
  CompletionGraph out;
  out.hphi = Graph(n);
  out.hbar = Graph(n);
  for (int i = 0; i < n; ++i)
    for (int delta = 1; delta <= k; ++delta) {
      const int j = (i + delta) % n;
      const bool guaranteed = bp.same_segment(i, j) && bp.xi[i] != bp.xi[j];
      (guaranteed ? out.hbar : out.hphi).add_edge(emb.phi[i], emb.phi[j]);
    }
  out.hphi_edges = out.hphi.edge_count();
  out.hbar_edges = out.hbar.edge_count();
  if (out.hphi_edges + out.hbar_edges != static_cast<long long>(n) * k)
    throw DomainError("completion: partition of E(C^k) broken");
  if (emb.host)
    for (auto [u, v] : out.hbar.edges())
      if (!emb.host->adjacent(u, v))
        throw DomainError("completion: guaranteed edge missing from the host");
  return out;
}

long long count_edges_bound(int v, int k) {
  if (v < 1) throw DomainError("count_edges_bound: v < 1");
  if (k < 3) throw PreconditionError("count_edges_bound: k < 3");
  long long s = 0;
  for (int i = 1; i <= std::min(v / 2, k); ++i) s += k - i;
  return (2LL * k + static_cast<long long>(v - 1) * 2 * (k - 1) - 2 * s) / 2;
}

namespace {

struct Esu {
  const Graph& g;
  int vmax;
  ClaimReport& rep;
  std::vector<int> sub;
  Bitset in_sub;
  long long edges = 0;

  Esu(const Graph& g_, int vmax_, ClaimReport& rep_)
      : g(g_), vmax(vmax_), rep(rep_), in_sub(g_.n()) {}

  void record() {
    ++rep.subgraphs_seen;
    const int v = static_cast<int>(sub.size());
    rep.max_edges[v] = std::max(rep.max_edges[v], edges);
  }

  // Classic connected-subgraph expansion: every connected set containing its
  // minimum vertex `root` is produced exactly once. `closed` marks root-bound
  // exclusions: the current set, everything already offered as an extension,
  // and all vertices <= root.
  void extend(std::vector<int> ext, Bitset closed) {
    record();
    if (static_cast<int>(sub.size()) == vmax) return;
    while (!ext.empty()) {
      const int w = ext.back();
      ext.pop_back();
      std::vector<int> next_ext = ext;
      Bitset next_closed = closed;
      for (int u : g.neighbors(w).to_indices())
        if (!next_closed.test(u)) {
          next_closed.set(u);
          next_ext.push_back(u);
        }
      sub.push_back(w);
      in_sub.set(w);
      const long long added = g.neighbors(w).and_count(in_sub);
      edges += added;
      extend(std::move(next_ext), std::move(next_closed));
      edges -= added;
      in_sub.reset(w);
      sub.pop_back();
    }
  }

  void run() {
    for (int v = 0; v < g.n(); ++v) {
      Bitset closed(g.n());
      for (int u = 0; u <= v; ++u) closed.set(u);
      std::vector<int> ext;
      for (int u : g.neighbors(v).to_indices())
        if (!closed.test(u)) {
          closed.set(u);
          ext.push_back(u);
        }
      sub.assign(1, v);
      in_sub.set(v);
      edges = 0;
      extend(std::move(ext), std::move(closed));
      in_sub.reset(v);
    }
  }
};

}  // namespace

ClaimReport check_claim_count_edge(const CompletionGraph& comp, int k, int vmax) {
  if (vmax < 1 || vmax > 12)
    throw PreconditionError("claim check: vmax outside 1..12");
  ClaimReport rep;
  rep.vmax = vmax;
  rep.max_edges.assign(vmax + 1, 0);
  rep.formula_bound.assign(vmax + 1, 0);
  rep.relaxed_bound.assign(vmax + 1, 0);
  for (int v = 1; v <= vmax; ++v) {
    rep.formula_bound[v] = count_edges_bound(v, k);
    rep.relaxed_bound[v] = static_cast<long long>(v) * (k - 1) - (k - 1);
  }
  Esu esu(comp.hphi, vmax, rep);
  esu.run();
  for (int v = 1; v <= vmax; ++v) {
    if (rep.max_edges[v] > rep.formula_bound[v]) rep.formula_ok = false;
    if (rep.max_edges[v] > rep.relaxed_bound[v]) rep.relaxed_ok = false;
  }
  return rep;
}

DecayReport estimate_edge_spread(const XiGoodSampler& sampler,
                                 const std::vector<std::pair<int, int>>& probe,
                                 const Blueprint& bp, int tmax,
                                 long long samples, Rng rng) {
  if (tmax < 0 || tmax > static_cast<int>(probe.size()))
    throw PreconditionError("edge spread: tmax outside 0..|probe|");
  DecayReport rep;
  rep.samples = samples;
  rep.counts.assign(tmax + 1, 0);
  for (long long i = 0; i < samples; ++i) {
    XiGoodEmbedding emb;
    try {
      emb = sampler(rng.split("sample", static_cast<std::uint64_t>(i)));
    } catch (const EmbedFailure&) {
      ++rep.failures;
      continue;
    }
    const CompletionGraph comp = completion_graph(emb, bp, bp.k);
    int t = 0;
    for (auto [u, v] : probe) t += comp.hphi.adjacent(u, v) ? 1 : 0;
    if (t <= tmax) ++rep.counts[t];
  }
  const long long ok = samples - rep.failures;
  rep.freq.assign(tmax + 1, 0.0);
  for (int t = 0; t <= tmax; ++t)
    rep.freq[t] = ok > 0 ? static_cast<double>(rep.counts[t]) / ok : 0.0;
  rep.partial = tmax >= 1 && rep.counts[tmax] == 0;
  rep.ref_log.assign(tmax + 1, 0.0);
  if (tmax >= 1 && rep.freq[1] > 0.0) {
    rep.c_prime = bp.n * std::pow(rep.freq[1], bp.k - 1);
    for (int t = 0; t <= tmax; ++t)
      rep.ref_log[t] = t * std::log(rep.c_prime / bp.n) / (bp.k - 1);
  }
  return rep;
}

bool verify_power_ham(const Graph& host, const std::vector<int>& phi, int k) {
  const int n = host.n();
  if (static_cast<int>(phi.size()) != n) return false;
  std::vector<char> seen(n, 0);
  for (int v : phi) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  for (int i = 0; i < n; ++i)
    for (int delta = 1; delta <= k; ++delta)
      if (!host.adjacent(phi[i], phi[(i + delta) % n])) return false;
  return true;
}

TrialOutcome perturbed_trial(const Graph& G, const RefinedSystem& refined,
                             const Blueprint& bp, const ParamSet& params,
                             double p, int phi_tries, Rng rng) {
  const int n = G.n();
  Graph gnp = sample_gnp(n, p, rng.split("gnp"));
  Graph uni = G;
  for (auto [u, v] : gnp.edges()) uni.add_edge(u, v);
  TrialOutcome out;
  for (int t = 0; t < phi_tries; ++t) {
    ++out.tries_used;
    XiGoodEmbedding emb;
    try {
      emb = sample_xi_good(G, refined, bp, params, rng.split("try", t));
    } catch (const EmbedFailure&) {
      ++out.sampler_failures;
      continue;
    }
    if (verify_power_ham(uni, emb.phi, bp.k)) {
      out.success = true;
      break;
    }
  }
  return out;
}

RefinedSystem hamilton_refined(const HamiltonHost& host) {
  RefinedSystem r;
  r.k = host.k;
  r.parts = host.parts;
  r.part_origin.resize(host.parts.size());
  for (std::size_t i = 0; i < host.parts.size(); ++i)
    r.part_origin[i] = static_cast<int>(i);
  int stars = static_cast<int>(host.parts.size()) / 4;
  for (int s = 0; s < stars; ++s)
    r.stars.push_back(Star{4 * s, {4 * s + 1, 4 * s + 2, 4 * s + 3}});
  r.exceptional = host.v0;
  // Balanced greedy keyed on the star's deficit relative to half its part
  // size: the blueprint needs |A_S| >= ceil(N_S / 2) per star (short trailing
  // zero block) and assign_exceptional's per-part greedy can skew the totals.
  std::vector<int> star_load(stars, 0);
  std::vector<int> part_load(host.parts.size(), 0);
  auto key = [&](int s, int leaf) {
    int ns = static_cast<int>(r.parts[r.stars[s].center].size());
    return std::make_tuple(2 * star_load[s] - ns, part_load[leaf], leaf);
  };
  for (int v : host.v0) {
    int best = -1;
    for (int s = 0; s < stars; ++s)
      for (int leaf : r.stars[s].leaves) {
        int nb = 0;
        for (int u : r.parts[leaf]) nb += host.G.adjacent(v, u) ? 1 : 0;
        if (2 * nb < static_cast<int>(r.parts[leaf].size())) continue;
        if (best < 0 || key(s, leaf) < key(best / 4, best)) best = leaf;
      }
    if (best < 0) throw DomainError("hamilton_refined: unassignable V0 vertex");
    r.assignment[v] = best;
    ++part_load[best];
    ++star_load[best / 4];
  }
  r.check_invariants();
  return r;
}

ParamSet hamilton_params(int k) {
  ParamSet p;
  p.d = 1.0;  // template pairs are complete in the generated hosts
  p.alpha = 0.9;
  // Interior 1-labels see at most k-1 zeros per side; the last 1-label of a
  // segment additionally sees the trailing zero block of up to k positions.
  p.Delta = 2 * k - 1;
  return p;
}

}  // namespace spreademb
