#include "spreademb/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spreademb/matchings.hpp"
#include "spreademb/regularity.hpp"

namespace spreademb {

using nlohmann::json;

void ParamSet::validate() const {
  const double chain[] = {eps, eps_p, eps_pp, beta, delta3, delta2, delta1, delta0};
  const char* names[] = {"eps", "eps_p", "eps_pp", "beta",
                         "delta3", "delta2", "delta1", "delta0"};
  for (int i = 0; i < 8; ++i)
    if (chain[i] <= 0.0 || chain[i] >= 1.0)
      throw PreconditionError(std::string("params: ") + names[i] + " outside (0,1)");
  for (int i = 0; i + 1 < 8; ++i)
    if (chain[i] >= chain[i + 1])
      throw PreconditionError(std::string("params: need ") + names[i] + " < " +
                              names[i + 1]);
  if (delta0 >= d || delta0 >= alpha)
    throw PreconditionError("params: delta0 must be below d and alpha");
  if (Delta < 1) throw PreconditionError("params: Delta < 1");
}

void TargetSpec::validate(const ClassSystem& sys, const ParamSet& params) const {
  const int N = sys.class_size;
  if (static_cast<int>(h.size()) != H.n())
    throw PreconditionError("target: homomorphism size mismatch");
  std::vector<int> load(sys.num_classes, 0);
  for (int x = 0; x < H.n(); ++x) {
    if (h[x] < 0 || h[x] >= sys.num_classes)
      throw PreconditionError("target: class index out of range");
    ++load[h[x]];
    if (H.degree(x) > params.Delta)
      throw PreconditionError("target: degree above Delta");
  }
  for (int i = 0; i < sys.num_classes; ++i)
    if (load[i] > N) throw PreconditionError("target: class over capacity");
  for (auto [u, v] : H.edges())
    if (!sys.reduced_adjacent(h[u], h[v]))
      throw PreconditionError("target: edge outside the reduced graph");
  if (static_cast<double>(W.size()) > params.beta * N)
    throw PreconditionError("target: |W| exceeds beta*N");
  for (int x : W) {
    auto it = Wx.find(x);
    if (it == Wx.end()) throw PreconditionError("target: W vertex without W_x");
    if (static_cast<double>(it->second.size()) < params.alpha * N)
      throw PreconditionError("target: |W_x| below alpha*N");
    for (int v : it->second)
      if (sys.class_of[v] != h[x])
        throw PreconditionError("target: W_x leaves class h(x)");
  }
}

namespace {

// BFS ball of radius `radius` around v.
Bitset ball(const Graph& g, int v, int radius) {
  Bitset seen(g.n());
  seen.set(v);
  std::vector<int> frontier{v};
  for (int depth = 0; depth < radius && !frontier.empty(); ++depth) {
    std::vector<int> next;
    for (int u : frontier)
      for (int w : g.neighbors(u).to_indices())
        if (!seen.test(w)) {
          seen.set(w);
          next.push_back(w);
        }
    frontier = std::move(next);
  }
  return seen;
}

}  // namespace

void PreparedInstance::check_invariants(const ClassSystem& sys) const {
  if (n != r * N || H.n() != n) throw DomainError("prepared: size mismatch");
  std::vector<int> bd;
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(B[i].size()) !=
        static_cast<int>(std::ceil(params.delta0 * N)))
      throw DomainError("prepared: |B_i| wrong");
    if (static_cast<int>(D[i].size()) !=
        static_cast<int>(std::ceil(params.beta * N)))
      throw DomainError("prepared: |D_i| wrong");
    for (int x : B[i]) bd.push_back(x);
    for (int x : D[i]) bd.push_back(x);
  }
  for (std::size_t a = 0; a < bd.size(); ++a)
    for (std::size_t b = a + 1; b < bd.size(); ++b) {
      int dist = H.distance(bd[a], bd[b]);
      if (dist >= 0 && dist < 4)
        throw DomainError("prepared: B u D members closer than 4");
    }
  for (int i = 0; i < r; ++i)
    for (int b : B[i])
      if (H.degree(b) != params.Delta)
        throw DomainError("prepared: B degree not Delta");
  for (int x = 0; x < n; ++x)
    if (H.degree(x) > params.Delta + 1)
      throw DomainError("prepared: degree above Delta+1");
  for (auto [u, v] : H.edges()) {
    if (!sys.reduced_adjacent(h[u], h[v]))
      throw DomainError("prepared: edge outside reduced graph");
  }
  // ordering: N_H(B) first, B last (unless moved by the algorithm later)
  Bitset nb(n);
  for (int i = 0; i < r; ++i)
    for (int b : B[i]) nb |= H.neighbors(b);
  if (nb.count() != nb_count) throw DomainError("prepared: nb_count wrong");
  for (int p = 0; p < nb_count; ++p)
    if (!nb.test(order[p])) throw DomainError("prepared: N_H(B) not first");
  int tail = n - 1;
  for (int i = 0; i < r; ++i) tail -= static_cast<int>(B[i].size());
  for (int p = tail + 1; p < n; ++p)
    if (!inB[order[p]]) throw DomainError("prepared: B not last");
}

PreparedInstance preprocess(const TargetSpec& spec, const ClassSystem& sys,
                            const ParamSet& params, Rng rng) {
  params.validate();
  spec.validate(sys, params);
  const int N = sys.class_size;
  const int r = sys.num_classes;
  const int n = r * N;

  PreparedInstance inst;
  inst.N = N;
  inst.r = r;
  inst.n = n;
  inst.params = params;

  // Pad each class with isolated vertices up to N.
  inst.H = Graph(n);
  inst.h.assign(n, -1);
  for (int x = 0; x < spec.H.n(); ++x) inst.h[x] = spec.h[x];
  for (auto [u, v] : spec.H.edges()) inst.H.add_edge(u, v);
  {
    std::vector<int> load(r, 0);
    for (int x = 0; x < spec.H.n(); ++x) ++load[spec.h[x]];
    int next = spec.H.n();
    for (int i = 0; i < r; ++i)
      while (load[i] < N) {
        inst.h[next++] = i;
        ++load[i];
      }
    if (next != n) throw PreconditionError("preprocess: padding mismatch");
  }

  // Image restrictions.
  inst.Wx.assign(n, Bitset(sys.host.n()));
  inst.wsize.assign(n, 0);
  Bitset w_mask(n);
  for (int x : spec.W) w_mask.set(x);
  for (int x = 0; x < n; ++x) {
    if (w_mask.test(x)) {
      for (int v : spec.Wx.at(x)) inst.Wx[x].set(v);
    } else {
      inst.Wx[x] = sys.class_mask(inst.h[x]);
    }
    inst.wsize[x] = inst.Wx[x].count();
  }

  // W plus its H-neighborhood is off-limits for buffers and augmentation.
  Bitset w_closed = w_mask;
  for (int x : spec.W) w_closed |= inst.H.neighbors(x);

  // Components of the original H (padded vertices are singletons); used to
  // spread augmentation endpoints across components and to order the steps.
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (int x0 = 0; x0 < n; ++x0) {
    if (comp[x0] >= 0) continue;
    std::vector<int> stack{x0};
    comp[x0] = ncomp;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      if (u >= spec.H.n()) continue;
      for (int v2 : spec.H.neighbors(u).to_indices())
        if (comp[v2] < 0) {
          comp[v2] = ncomp;
          stack.push_back(v2);
        }
    }
    ++ncomp;
  }

  // Buffer selection: greedy over a random order, keeping pairwise distance
  // at least 4 (i.e. rejecting anything inside a radius-3 ball of a pick).
  inst.B.assign(r, {});
  inst.D.assign(r, {});
  inst.inB.assign(n, false);
  inst.inD.assign(n, false);
  const int bsz = static_cast<int>(std::ceil(params.delta0 * N));
  const int dsz = static_cast<int>(std::ceil(params.beta * N));
  // Selection and augmentation are greedy and can paint themselves into a
  // corner on tightly packed instances; retry with fresh sub-streams before
  // declaring the instance infeasible.
  const Graph base_H = inst.H;
  const int kBufferAttempts = 20;   // randomized greedy
  const int kExactAttempts = 4;     // exact backtracking, fresh shuffles
  for (int attempt = 0;; ++attempt) {
    try {
      inst.H = base_H;
      inst.B.assign(r, {});
      inst.D.assign(r, {});
      inst.inB.assign(n, false);
      inst.inD.assign(n, false);
  {
    std::vector<std::vector<int>> perm(r);
    for (int x = 0; x < n; ++x)
      if (!w_closed.test(x) && inst.H.degree(x) <= params.Delta)
        perm[inst.h[x]].push_back(x);
    for (int i = 0; i < r; ++i)
      rng.split("buffers", attempt * r + i).shuffle(perm[i]);
    bool filled = false;
    if (attempt < kBufferAttempts) {
      // One pick per class per round: a per-class sweep lets the first
      // classes block most of the graph before later classes get a turn,
      // which starves small tightly connected instances.
      Bitset blocked(n);  // radius-3 balls of chosen members
      std::vector<int> cursor(r, 0);
      for (bool progress = true; progress;) {
        progress = false;
        for (int i = 0; i < r; ++i) {
          bool need_b = static_cast<int>(inst.B[i].size()) < bsz;
          bool need_d = static_cast<int>(inst.D[i].size()) < dsz;
          if (!need_b && !need_d) continue;
          while (cursor[i] < static_cast<int>(perm[i].size())) {
            int x = perm[i][cursor[i]++];
            if (blocked.test(x)) continue;
            if (need_b) {
              inst.B[i].push_back(x);
              inst.inB[x] = true;
            } else {
              inst.D[i].push_back(x);
              inst.inD[x] = true;
            }
            blocked |= ball(inst.H, x, 3);
            progress = true;
            break;
          }
        }
      }
      filled = true;
      for (int i = 0; i < r; ++i)
        if (static_cast<int>(inst.B[i].size()) < bsz ||
            static_cast<int>(inst.D[i].size()) < dsz)
          filled = false;
    } else {
      // Exact backtracking over the slot list (class by class, B then D);
      // the greedy misses packings on instances where the distance-4
      // capacity equals the demand. Within a class the picks are forced to
      // increasing perm order to avoid revisiting permuted duplicates.
      struct Slot { int cls; bool isB; };
      std::vector<Slot> slots;
      for (int i = 0; i < r; ++i) {
        for (int t = 0; t < bsz; ++t) slots.push_back({i, true});
        for (int t = 0; t < dsz; ++t) slots.push_back({i, false});
      }
      std::vector<int> picks(slots.size(), -1);
      long long budget = 4000000;
      std::function<bool(int, const Bitset&)> dfs = [&](int si,
                                                        const Bitset& blocked) {
        if (si == static_cast<int>(slots.size())) return true;
        if (--budget < 0) return false;
        const auto& sl = slots[si];
        int from = 0;
        if (si > 0 && slots[si - 1].cls == sl.cls) from = picks[si - 1] + 1;
        for (int ci = from; ci < static_cast<int>(perm[sl.cls].size()); ++ci) {
          int x = perm[sl.cls][ci];
          if (blocked.test(x)) continue;
          picks[si] = ci;
          Bitset next = blocked;
          next |= ball(inst.H, x, 3);
          if (dfs(si + 1, next)) {
            if (sl.isB) {
              inst.B[sl.cls].push_back(x);
              inst.inB[x] = true;
            } else {
              inst.D[sl.cls].push_back(x);
              inst.inD[x] = true;
            }
            return true;
          }
        }
        picks[si] = -1;
        return false;
      };
      filled = dfs(0, Bitset(n));
    }
    if (!filled)
      throw PreconditionError(
          "preprocess: not enough separated buffer candidates");
  }

  // Edge augmentation: raise every b in B to degree exactly Delta. Each new
  // endpoint is used once and must keep distance at least 3 from every buffer
  // member other than b itself (checked in the partially augmented graph, so
  // endpoints of different buffer vertices can never become adjacent) — this
  // preserves the pairwise distance-4 invariant. Two endpoints of the same b
  // may be close to each other.
  {
    Bitset bd_mask(n);
    for (int i = 0; i < r; ++i) {
      for (int x : inst.B[i]) bd_mask.set(x);
      for (int x : inst.D[i]) bd_mask.set(x);
    }
    Bitset endpoint_used(n);
    std::vector<int> all_b;
    for (int i = 0; i < r; ++i)
      for (int b : inst.B[i]) all_b.push_back(b);
    Rng arng = rng.split("augment", attempt);
    arng.shuffle(all_b);
    std::vector<int> cand(n);
    for (int x = 0; x < n; ++x) cand[x] = x;
    // A vertex with no embedded neighbor at its turn faces the strictest
    // admissibility filters, so as many components as possible should
    // receive an endpoint (which lands in the early prefix). An endpoint
    // claims its whole component for its b — anything there falls within
    // distance 2 of b afterwards — so untouched components are a scarce
    // resource: every b takes one for its first endpoint, and further
    // endpoints spread out only while enough untouched components remain
    // for the b's still waiting; otherwise they pack next to their own.
    // A component is a plausible endpoint host only if no buffer member
    // lives there (everything in such a component is within distance 2 of
    // that member) and some vertex escapes the W exclusion zone.
    std::vector<int> comp_endpoints(ncomp, 0), comp_open(ncomp, 0);
    for (int x = 0; x < n; ++x)
      if (x < spec.H.n() && !w_closed.test(x)) comp_open[comp[x]] = 1;
    for (int x = 0; x < n; ++x)
      if (bd_mask.test(x)) comp_open[comp[x]] = 0;
    int open_comps = 0;
    for (int c = 0; c < ncomp; ++c) open_comps += comp_open[c];
    for (std::size_t bi = 0; bi < all_b.size(); ++bi) {
      int b = static_cast<int>(all_b[bi]);
      int waiting = static_cast<int>(all_b.size() - 1 - bi);
      std::vector<int> added;
      while (inst.H.degree(b) < params.Delta) {
        arng.shuffle(cand);
        bool spread = added.empty() || open_comps > waiting;
        int pick = -1, pick_prio = 3;
        for (int u : cand) {
          if (u == b || inst.H.adjacent(b, u)) continue;
          if (w_closed.test(u) || bd_mask.test(u)) continue;
          if (endpoint_used.test(u)) continue;
          if (inst.H.degree(u) > params.Delta) continue;
          if (!sys.reduced_adjacent(inst.h[b], inst.h[u])) continue;
          Bitset reach = ball(inst.H, u, 2);
          reach &= bd_mask;
          reach.reset(b);
          if (reach.count() > 0) continue;  // too close to another buffer member
          int prio;
          bool fresh = comp_endpoints[comp[u]] == 0;
          bool own = false, class_rep = false;
          for (int a : added) {
            if (comp[a] == comp[u]) own = true;
            if (inst.h[a] == inst.h[u]) class_rep = true;
          }
          if (spread)
            prio = fresh ? 0 : own ? 1 : 2;
          else
            prio = own ? 0 : fresh ? 1 : 2;
          // endpoints of one b in one class skew the per-class service
          // rate of the prefix; keep them spread over the classes
          if (class_rep) prio += 3;
          if (prio < pick_prio) {
            pick = u;
            pick_prio = prio;
            if (prio == 0) break;
          }
        }
        if (pick < 0) {
          std::ostringstream msg;
          msg << "preprocess: augmentation infeasible for buffer vertex " << b
              << " in class " << inst.h[b];
          throw PreconditionError(msg.str());
        }
        inst.H.add_edge(b, pick);
        endpoint_used.set(pick);
        added.push_back(pick);
        if (comp_endpoints[comp[pick]]++ == 0 && comp_open[comp[pick]]) {
          comp_open[comp[pick]] = 0;
          --open_comps;
        }
      }
    }
  }
      break;
    } catch (const PreconditionError&) {
      if (attempt + 1 >= kBufferAttempts) throw;
    }
  }

  // N_H(D) cache (after augmentation; D degrees were never touched).
  inst.in_NHD.assign(n, false);
  for (int i = 0; i < r; ++i)
    for (int x : inst.D[i])
      for (int y : inst.H.neighbors(x).to_indices()) inst.in_NHD[y] = true;

  // Ordering: N_H(B) first, B last, everything else shuffled in between.
  // Within the prefix, each b's neighborhood forms a consecutive block (the
  // distance-4 separation makes these blocks disjoint), so every b reaches
  // its full embedded-neighbor count early and the low-set checkpoints pull
  // B forwards well before the exceptional step.
  {
    Bitset nb(n);
    for (int i = 0; i < r; ++i)
      for (int b : inst.B[i]) nb |= inst.H.neighbors(b);
    Rng orng = rng.split("order");
    // A block of b serves four vertices from the two classes other than
    // h(b), so round-robin the blocks over classes to keep the running
    // per-class service counts level from the start.
    std::vector<int> all_b;
    {
      std::vector<std::vector<int>> byc(r);
      for (int i = 0; i < r; ++i) {
        byc[i] = inst.B[i];
        orng.shuffle(byc[i]);
      }
      for (std::size_t k = 0;; ++k) {
        bool any = false;
        for (int i = 0; i < r; ++i)
          if (k < byc[i].size()) {
            all_b.push_back(byc[i][k]);
            any = true;
          }
        if (!any) break;
      }
    }
    std::vector<int> first;
    for (int b : all_b) {
      std::vector<int> block = inst.H.neighbors(b).to_indices();
      orng.shuffle(block);
      first.insert(first.end(), block.begin(), block.end());
    }
    std::vector<int> mid, last;
    for (int x = 0; x < n; ++x) {
      if (nb.test(x)) continue;
      (inst.inB[x] ? last : mid).push_back(x);
    }
    orng.shuffle(mid);
    orng.shuffle(last);
    // Arrange the middle component by component of the original H. A vertex
    // served while it still has several unembedded neighbors faces the
    // admissibility filters, so those steps must happen while the free sets
    // are large: big components first, then components with restricted
    // images or untouched by the prefix, then the rest; within a component
    // id order (connected order). Injection targets D and padded isolated
    // vertices go last — their steps are unconditional, and D has to outlive
    // the exceptional step.
    {
      std::vector<int> cw(ncomp, 0), chard(ncomp, 0);
      for (int x : spec.W) cw[comp[x]] = 1;
      // Components with high-degree vertices have the smallest candidate
      // sets and the most conditions per step; they go first, while the
      // pools are still big.
      for (int x = 0; x < spec.H.n(); ++x)
        if (spec.H.degree(x) >= 3) chard[comp[x]] = 1;
      // Service order within a component: random for complete components,
      // id order or its reverse for the rest (so every later member still
      // touches earlier ones). A fixed orientation would always defer the
      // same residue class and starve the other classes of late services.
      std::vector<int> rank_in(n, 0);
      {
        std::vector<std::vector<int>> members(ncomp);
        for (int x = 0; x < n; ++x) members[comp[x]].push_back(x);
        for (int c = 0; c < ncomp; ++c) {
          auto& m = members[c];
          bool complete = true;
          for (std::size_t a = 0; a < m.size() && complete; ++a)
            for (std::size_t bb = a + 1; bb < m.size(); ++bb)
              if (!spec.H.adjacent(m[a], m[bb]) &&
                  std::max(m[a], m[bb]) < spec.H.n()) {
                complete = false;
                break;
              }
          if (complete)
            orng.shuffle(m);
          else if (orng.next_below(2) == 1)
            std::reverse(m.begin(), m.end());
          for (std::size_t k = 0; k < m.size(); ++k)
            rank_in[m[k]] = static_cast<int>(k);
        }
      }
      // A member whose neighbors all come earlier (or sit in the prefix) is
      // embedded through the unconditional fast path and can wait; everyone
      // else must be served while the free sets are big.
      std::vector<std::uint8_t> deferred(n, 0);
      {
        std::vector<int> by_rank = mid;
        std::sort(by_rank.begin(), by_rank.end(), [&](int a, int b) {
          return rank_in[a] < rank_in[b];
        });
        for (int x : by_rank) {
          if (inst.inD[x] || x >= spec.H.n()) {
            deferred[x] = 1;  // tail anyway
            continue;
          }
          bool safe = true;
          for (int y : inst.H.neighbors(x).to_indices())
            if (!nb.test(y) && !(rank_in[y] < rank_in[x] && !deferred[y])) {
              safe = false;
              break;
            }
          deferred[x] = safe ? 1 : 0;
        }
      }
      // Schedule tier by tier (risky, deferred, D, padding); within a tier
      // pick greedily from the least-served class so the running per-class
      // counts stay level — a class that runs ahead shrinks all its free
      // candidate sets and drags its remaining vertices into the low set,
      // which only widens the gap. Precedence: a risky member waits for its
      // lower-ranked risky component mates, so its unembedded-neighbor count
      // at service matches the deferral analysis.
      auto tier_of = [&](int x) {
        return !deferred[x]       ? 0
               : x >= spec.H.n()  ? 3
               : inst.inD[x]      ? 2
                                  : 1;
      };
      std::vector<int> served(r, 0);
      for (int i = 0; i < r; ++i) {
        served[i] += static_cast<int>(inst.B[i].size());  // pulled early
        for (int x = 0; x < n; ++x)
          if (nb.test(x) && inst.h[x] == i) ++served[i];
      }
      std::vector<int> sched;
      sched.reserve(mid.size());
      std::vector<std::uint8_t> done(n, 0);
      for (int tier = 0; tier < 4; ++tier) {
        std::vector<int> pool;
        for (int x : mid)
          if (tier_of(x) == tier) pool.push_back(x);
        orng.shuffle(pool);
        std::vector<std::uint8_t> out(pool.size(), 0);
        for (std::size_t t = 0; t < pool.size(); ++t) {
          int best = -1;
          auto bkey = std::make_tuple(1 << 30, 0, 0, 0);
          for (std::size_t a = 0; a < pool.size(); ++a) {
            if (out[a]) continue;
            int x = pool[a];
            bool ready = true;
            int pend = 0;
            for (int y : inst.H.neighbors(x).to_indices()) {
              if (nb.test(y) || done[y]) continue;
              ++pend;
              if (tier_of(y) == tier && rank_in[y] < rank_in[x] &&
                  comp[y] == comp[x])
                ready = false;
            }
            if (!ready) continue;
            auto k = std::make_tuple(served[inst.h[x]], 1 - chard[comp[x]],
                                     1 - cw[comp[x]], -pend);
            if (best < 0 || k < bkey) {
              best = static_cast<int>(a);
              bkey = k;
            }
          }
          int x = pool[best];
          out[best] = 1;
          done[x] = 1;
          ++served[inst.h[x]];
          sched.push_back(x);
        }
      }
      mid = sched;
    }
    inst.order = first;
    inst.order.insert(inst.order.end(), mid.begin(), mid.end());
    inst.order.insert(inst.order.end(), last.begin(), last.end());
    inst.nb_count = static_cast<int>(first.size());
  }

  inst.check_invariants(sys);
  return inst;
}

// --- EmbedState ----------------------------------------------------------

EmbedState::EmbedState(const PreparedInstance& inst, const ClassSystem& sys,
                       bool relaxed_p2)
    : inst_(inst),
      sys_(sys),
      relaxed_(relaxed_p2),
      phi_(inst.n, -1),
      used_(sys.host.n()),
      ell_(inst.n, 0),
      order_(inst.order) {
  C_.reserve(inst_.n);
  for (int x = 0; x < inst_.n; ++x) C_.push_back(inst_.Wx[x]);
  const int maxl = 2 * (inst_.params.Delta + 2);
  pow_lo_.resize(maxl + 1);
  pow_hi_.resize(maxl + 1);
  for (int l = 0; l <= maxl; ++l) {
    pow_lo_[l] = std::pow(inst_.params.d - inst_.params.eps, l);
    pow_hi_[l] = std::pow(inst_.params.d + inst_.params.eps, l);
  }
  book_.resize(inst_.r);
  for (int i = 0; i < inst_.r; ++i) {
    book_[i].local.assign(inst_.n, -1);
  }
  for (int x = 0; x < inst_.n; ++x) {
    auto& bk = book_[inst_.h[x]];
    bk.local[x] = static_cast<int>(bk.members.size());
    bk.members.push_back(x);
  }
  for (auto& bk : book_)
    bk.viol.assign(bk.members.size() * bk.members.size(), 0);
  log_.min_admissible = sys.host.n();
  log_.min_free_candidates = static_cast<double>(sys.host.n());
}

const Bitset& EmbedState::candidate_set(int x) const {
  if (phi_[x] >= 0) throw DomainError("candidate_set: vertex already embedded");
  return C_[x];
}

bool EmbedState::p2_active(int x) const {
  return phi_[x] < 0 && !inst_.in_NHD[x];
}

void EmbedState::refresh_pairs(int y) {
  if (!p2_active(y)) return;
  auto& bk = book_[inst_.h[y]];
  const int m = static_cast<int>(bk.members.size());
  const int ly = bk.local[y];
  const double N = inst_.N;
  for (int lz = 0; lz < m; ++lz) {
    if (lz == ly) continue;
    int z = bk.members[lz];
    std::uint8_t nv = 0;
    if (p2_active(z)) {
      double thr = pow_hi_[ell_[y] + ell_[z]] * N;
      nv = C_[y].and_count(C_[z]) > thr ? 1 : 0;
    }
    std::uint8_t& a = bk.viol[ly * m + lz];
    std::uint8_t& b = bk.viol[lz * m + ly];
    bk.count += (nv - a) + (nv - b);
    a = nv;
    b = nv;
  }
}

void EmbedState::deactivate(int x) {
  auto& bk = book_[inst_.h[x]];
  const int m = static_cast<int>(bk.members.size());
  const int lx = bk.local[x];
  for (int lz = 0; lz < m; ++lz) {
    if (lz == lx) continue;
    std::uint8_t& a = bk.viol[lx * m + lz];
    std::uint8_t& b = bk.viol[lz * m + lx];
    bk.count -= a + b;
    a = 0;
    b = 0;
  }
}

void EmbedState::commit(int x, int v) {
  if (order_[j_] != x) throw DomainError("commit: vertex out of order");
  if (phi_[x] >= 0) throw DomainError("commit: already embedded");
  if (!C_[x].test(v) || used_.test(v))
    throw EmbedFailure("commit: image not a free candidate", "commit");
  deactivate(x);
  phi_[x] = v;
  used_.set(v);
  ++j_;
  std::vector<int> affected;
  for (int y : inst_.H.neighbors(x).to_indices())
    if (phi_[y] < 0) {
      C_[y] &= sys_.host.neighbors(v);
      ++ell_[y];
      affected.push_back(y);
    }
  for (int y : affected) refresh_pairs(y);
}

std::vector<int> EmbedState::recompute_low_set() {
  const double thr = inst_.params.delta1 * inst_.N;
  std::vector<int> low;
  std::vector<long long> freec(inst_.n, 0);
  Bitset in_low(inst_.n);
  for (int p = j_; p < inst_.n; ++p) {
    int x = order_[p];
    freec[x] = C_[x].minus_count(used_);
    double free_c = static_cast<double>(freec[x]);
    log_.min_free_candidates = std::min(log_.min_free_candidates, free_c);
    if (free_c < thr) {
      low.push_back(x);
      in_low.set(x);
    }
  }
  // Inside the prefix keep the blocks intact: just move low vertices to the
  // front, as usual.
  if (j_ < inst_.nb_count) {
    if (!low.empty()) {
      std::stable_partition(order_.begin() + j_, order_.end(),
                            [&](int x) { return in_low.test(x); });
      ++log_.reorder_events;
      log_.total_moved_forward += static_cast<int>(low.size());
    }
    return low;
  }
  // Rebuild the tail. A vertex embeds into its own class only, so "low
  // first" needs to hold only inside each class: per class, starved
  // vertices (scarcest first) ahead of the rest in their current order.
  // Across classes interleave from the class with the fewest used hosts —
  // a class that runs ahead shrinks all its candidate sets and drags the
  // rest of the class into the low set, and the merge order is the one
  // knob that leans against that feedback.
  {
    std::vector<std::vector<int>> q(inst_.r);
    for (int p = j_; p < inst_.n; ++p) {
      int x = order_[p];
      q[inst_.h[x]].push_back(x);
    }
    // Vertices that still have unembedded neighbors face the admissibility
    // filters, and the filters tighten as the class pool drains — so all of
    // them go before the unconditional tail, starved ones first. Among the
    // unconditional ones only the critically starved (a candidate or less
    // to spare) may cut in; the rest can wait for the phase-two matching.
    auto lowkey = [&](int x) {
      int pend = 0;
      for (int y : inst_.H.neighbors(x).to_indices())
        if (phi_[y] < 0) ++pend;
      int bucket;
      if (pend > 0)
        bucket = in_low.test(x) ? 0 : 2;
      else
        bucket = freec[x] <= 1 ? 1 : in_low.test(x) ? 3 : 4;
      long long f = bucket == 2 || bucket == 4 ? 0 : freec[x];
      return std::make_pair(bucket, f);
    };
    for (int i = 0; i < inst_.r; ++i)
      std::stable_sort(q[i].begin(), q[i].end(),
                       [&](int a, int b) { return lowkey(a) < lowkey(b); });
    std::vector<long long> load(inst_.r, 0);
    for (int i = 0; i < inst_.r; ++i) {
      Bitset cu = sys_.class_mask(i);
      cu &= used_;
      load[i] = cu.count();
    }
    std::vector<std::size_t> head(inst_.r, 0);
    for (int p = j_; p < inst_.n; ++p) {
      int pick = -1;
      for (int i = 0; i < inst_.r; ++i) {
        if (head[i] >= q[i].size()) continue;
        if (pick < 0 || load[i] < load[pick]) pick = i;
      }
      order_[p] = q[pick][head[pick]++];
      ++load[pick];
    }
  }
  if (!low.empty()) {
    ++log_.reorder_events;
    log_.total_moved_forward += static_cast<int>(low.size());
  }
  return low;
}

long long EmbedState::p2_extension_count(int cls, int x, int v,
                                         const std::vector<int>& affected) const {
  const auto& bk = book_[cls];
  const int m = static_cast<int>(bk.members.size());
  const double N = inst_.N;
  const Bitset& nv = sys_.host.neighbors(v);

  // touched = affected class members plus x itself (it leaves the pair set)
  std::vector<int> touched;
  for (int y : affected)
    if (inst_.h[y] == cls && p2_active(y)) touched.push_back(y);
  bool x_here = inst_.h[x] == cls && p2_active(x);

  long long base = bk.count;
  auto strip = [&](int t) {
    const int lt = bk.local[t];
    for (int lz = 0; lz < m; ++lz) {
      if (lz == lt) continue;
      base -= bk.viol[lt * m + lz] + bk.viol[lz * m + lt];
    }
  };
  // subtract rows once; add back double-subtracted touched-touched entries
  if (x_here) strip(x);
  for (int t : touched) strip(t);
  {
    std::vector<int> all = touched;
    if (x_here) all.push_back(x);
    for (std::size_t a = 0; a < all.size(); ++a)
      for (std::size_t b = a + 1; b < all.size(); ++b) {
        int la = bk.local[all[a]], lb = bk.local[all[b]];
        base += bk.viol[la * m + lb] + bk.viol[lb * m + la];
      }
  }

  // re-add pairs with the extension's candidate sets (x excluded: embedded)
  Bitset in_touched(inst_.n);
  for (int t : touched) in_touched.set(t);
  // relaxed mode: estimate the re-add term from a sampled pair subset
  const int sample_cap = 128;
  long long add = 0;
  for (std::size_t a = 0; a < touched.size(); ++a) {
    int t = touched[a];
    int lt_ell = ell_[t] + 1;
    if (relaxed_ && m > sample_cap) {
      int hits = 0, probed = 0, eligible = 0;
      for (int lz = 0; lz < m; ++lz) {
        int z = bk.members[lz];
        if (z == t || z == x || !p2_active(z) || in_touched.test(z)) continue;
        ++eligible;
      }
      for (int q = 0; q < sample_cap && eligible > 0; ++q) {
        int z = bk.members[probe_rng_.next_below(m)];
        if (z == t || z == x || !p2_active(z) || in_touched.test(z)) continue;
        ++probed;
        double thr = pow_hi_[lt_ell + ell_[z]] * N;
        if (C_[t].and_count(C_[z], nv) > thr) ++hits;
      }
      if (probed > 0)
        add += 2LL * static_cast<long long>(
                         std::llround(static_cast<double>(hits) * eligible / probed));
    } else {
      for (int lz = 0; lz < m; ++lz) {
        int z = bk.members[lz];
        if (z == t || z == x || !p2_active(z) || in_touched.test(z)) continue;
        double thr = pow_hi_[lt_ell + ell_[z]] * N;
        if (C_[t].and_count(C_[z], nv) > thr) add += 2;
      }
    }
    for (std::size_t b = a + 1; b < touched.size(); ++b) {
      int u = touched[b];
      double thr = pow_hi_[lt_ell + ell_[u] + 1] * N;
      Bitset tmp = C_[t];
      tmp &= C_[u];
      tmp &= nv;
      if (static_cast<double>(tmp.count()) > thr) add += 2;
    }
  }
  return base + add;
}

int EmbedState::extension_reject(int x, int v) const {
  const auto& P = inst_.params;
  const Bitset& nv = sys_.host.neighbors(v);
  std::vector<int> affected;
  for (int y : inst_.H.neighbors(x).to_indices())
    if (phi_[y] < 0) affected.push_back(y);

  for (int y : affected) {
    // (i): v keeps a proportional share of y's free candidates
    long long free_c = C_[y].minus_count(used_);
    long long kept = C_[y].and_minus_count(nv, used_);
    if (static_cast<double>(kept) < (P.d - P.eps) * static_cast<double>(free_c))
      return 1;
    // (P1) after the extension
    long long c_new = C_[y].and_count(nv);
    if (static_cast<double>(c_new) <
        pow_lo_[ell_[y] + 1] * static_cast<double>(inst_.wsize[y]))
      return 2;
  }

  // (P2) budget per class, for classes whose pair sets change
  const double budget = P.eps_p * static_cast<double>(j_ + 1) * inst_.N;
  std::vector<int> classes;
  if (p2_active(x)) classes.push_back(inst_.h[x]);
  for (int y : affected)
    if (p2_active(y) &&
        std::find(classes.begin(), classes.end(), inst_.h[y]) == classes.end())
      classes.push_back(inst_.h[y]);
  for (int cls : classes)
    if (static_cast<double>(p2_extension_count(cls, x, v, affected)) > budget)
      return 3;
  return 0;
}

bool EmbedState::extension_ok(int x, int v) const {
  return extension_reject(x, v) == 0;
}

std::vector<int> EmbedState::admissible_targets(int x) const {
  if (phi_[x] >= 0) throw DomainError("admissible_targets: already embedded");
  std::vector<int> free = [&] {
    Bitset f = C_[x];
    f.subtract(used_);
    return f.to_indices();
  }();

  bool trivial = true;
  for (int y : inst_.H.neighbors(x).to_indices())
    if (phi_[y] < 0) trivial = false;
  if (trivial) return free;  // no candidate set changes; (P2) only improves

  std::vector<int> out;
  out.reserve(free.size());
  for (int v : free)
    if (extension_ok(x, v)) out.push_back(v);
  return out;
}

bool EmbedState::exceptional_plan(std::vector<std::vector<int>>& E,
                                  std::vector<std::vector<int>>& dfree) const {
  E.assign(inst_.r, {});
  dfree.assign(inst_.r, {});
  bool feasible = true;
  for (int i = 0; i < inst_.r; ++i) {
    std::vector<int> bfree;
    for (int b : inst_.B[i])
      if (phi_[b] < 0) bfree.push_back(b);
    if (!bfree.empty()) {
      const double thr = inst_.params.delta1 * static_cast<double>(bfree.size());
      for (int v : sys_.classes[i]) {
        if (used_.test(v)) continue;
        int cover = 0;
        for (int b : bfree) cover += C_[b].test(v) ? 1 : 0;
        if (static_cast<double>(cover) < thr) E[i].push_back(v);
      }
    }
    for (int x : inst_.D[i])
      if (phi_[x] < 0) dfree[i].push_back(x);
    if (E[i].size() > dfree[i].size()) {
      feasible = false;
    } else if (!E[i].empty()) {
      // the forced images must actually be candidates of the D vertices
      BipartitePair pr(static_cast<int>(E[i].size()),
                       static_cast<int>(dfree[i].size()));
      for (std::size_t a = 0; a < E[i].size(); ++a)
        for (std::size_t b = 0; b < dfree[i].size(); ++b)
          if (C_[dfree[i][b]].test(E[i][a]) && !used_.test(E[i][a]))
            pr.add_edge(static_cast<int>(a), static_cast<int>(b));
      if (maximum_matching_size(pr) < static_cast<int>(E[i].size()))
        feasible = false;
    }
  }
  return feasible;
}

void EmbedState::exceptional_step(Rng& rng) {
  std::vector<std::vector<int>> E, dfree;
  bool feasible = exceptional_plan(E, dfree);
  for (int i = 0; i < inst_.r; ++i)
    log_.exceptional_sizes.push_back(static_cast<int>(E[i].size()));
  if (!feasible)
    throw EmbedFailure("exceptional step: more bad vertices than buffer D",
                       "exceptional");
  std::vector<int> forced_order;
  std::vector<std::pair<int, int>> forced;  // (D vertex, host image)
  for (int i = 0; i < inst_.r; ++i) {
    if (E[i].empty()) continue;
    // shuffle the buffer side so the injection is randomized among the valid
    // assignments, then match hosts to D vertices whose candidate sets allow
    // them
    Rng crng = rng.split("inject", i);
    crng.shuffle(dfree[i]);
    BipartitePair pr(static_cast<int>(E[i].size()),
                     static_cast<int>(dfree[i].size()));
    for (std::size_t a = 0; a < E[i].size(); ++a)
      for (std::size_t b = 0; b < dfree[i].size(); ++b)
        if (C_[dfree[i][b]].test(E[i][a])) pr.add_edge(static_cast<int>(a),
                                                       static_cast<int>(b));
    Matching m;
    if (maximum_matching_size(pr, &m) < static_cast<int>(E[i].size()))
      throw EmbedFailure("exceptional step: no valid injection into D",
                         "exceptional");
    for (std::size_t a = 0; a < E[i].size(); ++a) {
      forced.emplace_back(dfree[i][m[a]], E[i][a]);
      forced_order.push_back(dfree[i][m[a]]);
    }
  }
  if (forced.empty()) return;

  // move the chosen D vertices to the front of the tail, then embed them
  Bitset in_forced(inst_.n);
  for (int x : forced_order) in_forced.set(x);
  std::stable_partition(order_.begin() + j_, order_.end(),
                        [&](int x) { return in_forced.test(x); });
  // keep the forced block in the injection order
  for (std::size_t t = 0; t < forced_order.size(); ++t)
    order_[j_ + t] = forced_order[t];
  for (auto [x, v] : forced) {
    if (!C_[x].test(v) || used_.test(v))
      throw EmbedFailure("exceptional step: forced image not a candidate",
                         "exceptional");
    commit(x, v);
  }
}

void EmbedState::phase_one(Rng rng) {
  const int s = static_cast<int>(std::ceil(inst_.params.delta2 * inst_.N));
  int last_checkpoint = -1;
  Rng pick = rng.split("pick");
  for (;;) {
    // Phase one's conditions only bite while some unembedded vertex still
    // has an unembedded neighbor. Once the tail is an independent set of
    // fully-exposed vertices (buffers and saved last members), every later
    // step would be an unconditional pick, and the per-class matching of
    // phase two handles that endgame exactly instead of greedily.
    bool pending = false;
    for (int p = j_; p < inst_.n && !pending; ++p) {
      int x = order_[p];
      for (int y : inst_.H.neighbors(x).to_indices())
        if (phi_[y] < 0) {
          pending = true;
          break;
        }
      // A critically starved vertex is safer embedded now than left to the
      // matching; with a candidate to spare the matching handles it.
      if (C_[x].minus_count(used_) <= 1) pending = true;
    }
    if (!exceptional_done_ && j_ >= inst_.nb_count) pending = true;
    if (!pending) break;

    if (j_ % s == 0 && j_ != last_checkpoint) {
      last_checkpoint = j_;
      recompute_low_set();
    }
    // The index |N_H(B)| is only the earliest moment the candidate sets of B
    // are final; low-set reordering can leave a few B vertices queued right
    // at it, and forcing the step then would count nearly every free vertex
    // as badly covered. Fire at the first step where the injections fit D.
    if (!exceptional_done_ && j_ >= inst_.nb_count) {
      std::vector<std::vector<int>> E, dfree;
      if (exceptional_plan(E, dfree)) {
        exceptional_done_ = true;
        exceptional_step(rng);
        continue;
      }
    }
    // Emergency cut-in: a tail vertex down to its last free candidate cannot
    // wait for the next checkpoint reorder, so it jumps the queue.
    {
      int cut = -1;
      long long cf = 2;
      for (int p = j_; p < inst_.n; ++p) {
        long long f = C_[order_[p]].minus_count(used_);
        if (f < cf) {
          cf = f;
          cut = p;
          if (cf == 0) break;
        }
      }
      if (cut > j_) {
        int x = order_[cut];
        order_.erase(order_.begin() + cut);
        order_.insert(order_.begin() + j_, x);
        ++log_.reorder_events;
        ++log_.total_moved_forward;
      }
    }
    int x = order_[j_];
    auto A = admissible_targets(x);
    if (A.empty()) {
      Bitset f = C_[x];
      f.subtract(used_);
      int n_i = 0, n_p1 = 0, n_p2 = 0;
      for (int v : f.to_indices()) {
        switch (extension_reject(x, v)) {
          case 1: ++n_i; break;
          case 2: ++n_p1; break;
          case 3: ++n_p2; break;
          default: break;
        }
      }
      std::ostringstream msg;
      msg << "phase one: no admissible image for vertex " << x << " at step "
          << j_ << " (free=" << f.count() << " rej_i=" << n_i
          << " rej_p1=" << n_p1 << " rej_p2=" << n_p2 << " ell=" << ell_[x]
          << ")";
      throw EmbedFailure(msg.str(), "phase1");
    }
    log_.min_admissible = std::min(log_.min_admissible, static_cast<int>(A.size()));
    int v = A[pick.next_below(A.size())];
    commit(x, v);
  }
  log_.T = j_;
}

Embedding EmbedState::phase_two(Rng rng) {
  for (int i = 0; i < inst_.r; ++i) {
    std::vector<int> bfree;
    for (int x = 0; x < inst_.n; ++x)
      if (phi_[x] < 0 && inst_.h[x] == i) bfree.push_back(x);
    std::vector<int> freev;
    for (int v : sys_.classes[i])
      if (!used_.test(v)) freev.push_back(v);
    log_.phase2_sizes.push_back(static_cast<int>(bfree.size()));
    if (bfree.size() != freev.size())
      throw EmbedFailure("phase two: class balance broken", "phase2");
    const int m = static_cast<int>(bfree.size());
    if (m == 0) continue;

    BipartitePair gi(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (C_[bfree[a]].test(freev[b])) gi.add_edge(a, b);

    Matching match;
    try {
      if (m <= kExactMatchingLimit) {
        // Below the lemma's asymptotic regime the exact uniform law over
        // perfect matchings of G_i is the spread-optimal instantiation;
        // extraction would drop below one edge per vertex here.
        match = sample_uniform_matching_exact(gi, rng.split("match", i));
      } else {
        match = sample_spread_matching(gi, inst_.params.eps, inst_.params.delta3,
                                       rng.split("match", i));
      }
    } catch (const DomainError& e) {
      throw EmbedFailure(std::string("phase two: ") + e.what(), "phase2");
    } catch (const PreconditionError& e) {
      throw EmbedFailure(std::string("phase two: ") + e.what(), "phase2");
    }
    for (int a = 0; a < m; ++a) {
      int x = bfree[a], v = freev[match[a]];
      phi_[x] = v;
      used_.set(v);
    }
  }
  return phi_;
}

bool EmbedState::check_p1_exact() const {
  for (int x = 0; x < inst_.n; ++x) {
    if (phi_[x] >= 0) continue;
    Bitset c = inst_.Wx[x];
    int l = 0;
    for (int y : inst_.H.neighbors(x).to_indices())
      if (phi_[y] >= 0) {
        c &= sys_.host.neighbors(phi_[y]);
        ++l;
      }
    if (l != ell_[x]) return false;
    if (!(c == C_[x])) return false;
    if (static_cast<double>(c.count()) <
        pow_lo_[l] * static_cast<double>(inst_.wsize[x]))
      return false;
  }
  return true;
}

std::vector<long long> EmbedState::p2_counts_exact() const {
  std::vector<long long> out(inst_.r, 0);
  for (int i = 0; i < inst_.r; ++i) {
    const auto& bk = book_[i];
    const int m = static_cast<int>(bk.members.size());
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        if (a == b) continue;
        int x = bk.members[a], y = bk.members[b];
        if (!p2_active(x) || !p2_active(y)) continue;
        double thr = pow_hi_[ell_[x] + ell_[y]] * inst_.N;
        if (C_[x].and_count(C_[y]) > thr) ++out[i];
      }
  }
  return out;
}

std::vector<long long> EmbedState::p2_counts() const {
  std::vector<long long> out;
  for (const auto& bk : book_) out.push_back(bk.count);
  return out;
}

EmbedResult embed(const TargetSpec& spec, const ClassSystem& sys,
                  const ParamSet& params, Rng rng, bool relaxed_p2) {
  params.validate();
  spec.validate(sys, params);
  // Required pairs: the blow-up hypotheses operate through minimum degree
  // and the codegree criterion; literal subset-regularity at these sizes is
  // unverifiable, so the gate is min degree + quasirandomness.
  for (auto [i, jc] : sys.reduced_edges) {
    auto pair = sys.pair_between(i, jc);
    ExactDensity dn = density(pair);
    if (std::abs(dn.value() - params.d) > params.eps) {
      std::ostringstream msg;
      msg << "embed: pair (" << i << "," << jc << ") density " << dn.value()
          << " is not within eps of d=" << params.d;
      throw PreconditionError(msg.str());
    }
    double floor_deg = (params.d - params.eps) * sys.class_size;
    for (int x = 0; x < pair.nx(); ++x)
      if (pair.x_degree(x) < floor_deg)
        throw PreconditionError("embed: pair min degree below (d-eps)N");
    for (int y = 0; y < pair.ny(); ++y)
      if (pair.y_degree(y) < floor_deg)
        throw PreconditionError("embed: pair min degree below (d-eps)N");
    // xi = eps here, not eps*d^4: at finite N the diagonal of the codegree
    // sum alone contributes ~d^2/N to S/N^4, so the asymptotic mapping would
    // reject genuinely biregular pairs.
    if (!is_quasirandom(pair, params.eps, 0.0).pass) {
      std::ostringstream msg;
      msg << "embed: pair (" << i << "," << jc << ") fails the codegree test";
      throw PreconditionError(msg.str());
    }
  }

  // Las Vegas restarts: each attempt draws every random choice from a fresh
  // sub-stream, so failures across attempts are close to independent and the
  // output distribution is the success-conditioned one either way.
  const int kEmbedAttempts = 8;
  for (int t = 0;; ++t) {
    try {
      Rng arng = rng.split("attempt", t);
      PreparedInstance inst = preprocess(spec, sys, params, arng.split("prep"));
      EmbedState state(inst, sys, relaxed_p2);
      state.phase_one(arng.split("phase1"));
      Embedding phi = state.phase_two(arng.split("phase2"));
      EmbedResult res;
      res.phi = std::move(phi);
      res.log = state.log();
      return res;
    } catch (const EmbedFailure&) {
      if (t + 1 >= kEmbedAttempts) throw;
    }
  }
}

bool verify_embedding(const TargetSpec& spec, const ClassSystem& sys,
                      const Embedding& phi) {
  if (static_cast<int>(phi.size()) < spec.H.n()) return false;
  Bitset used(sys.host.n());
  for (int v : phi) {
    if (v < 0) continue;
    if (v >= sys.host.n() || used.test(v)) return false;
    used.set(v);
  }
  for (int x = 0; x < spec.H.n(); ++x) {
    if (phi[x] < 0) return false;
    if (sys.class_of[phi[x]] != spec.h[x]) return false;
  }
  for (auto [u, v] : spec.H.edges())
    if (!sys.host.adjacent(phi[u], phi[v])) return false;
  for (int x : spec.W) {
    const auto& allowed = spec.Wx.at(x);
    if (std::find(allowed.begin(), allowed.end(), phi[x]) == allowed.end())
      return false;
  }
  return true;
}

// --- serialization -------------------------------------------------------

TargetSpec load_target_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open target spec: " + path);
  json doc = json::parse(in);
  TargetSpec spec;
  spec.H = Graph(doc.at("n").get<int>());
  for (const auto& e : doc.at("edges"))
    spec.H.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
  spec.h = doc.at("h").get<std::vector<int>>();
  if (doc.contains("W")) {
    for (auto& [key, val] : doc.at("W").items()) {
      int x = std::stoi(key);
      spec.W.push_back(x);
      spec.Wx[x] = val.get<std::vector<int>>();
    }
    std::sort(spec.W.begin(), spec.W.end());
  }
  return spec;
}

void save_target_spec(const std::string& path, const TargetSpec& spec) {
  json doc;
  doc["n"] = spec.H.n();
  doc["edges"] = json::array();
  for (auto [u, v] : spec.H.edges()) doc["edges"].push_back({u, v});
  doc["h"] = spec.h;
  if (!spec.W.empty()) {
    json w = json::object();
    for (int x : spec.W) w[std::to_string(x)] = spec.Wx.at(x);
    doc["W"] = w;
  }
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write target spec: " + path);
  out << doc.dump(2) << "\n";
}

ParamSet load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open params: " + path);
  json doc = json::parse(in);
  ParamSet p;
  auto get = [&](const char* key, double& slot) {
    if (doc.contains(key)) slot = doc.at(key).get<double>();
  };
  get("eps", p.eps);
  get("eps_p", p.eps_p);
  get("eps_pp", p.eps_pp);
  get("beta", p.beta);
  get("delta3", p.delta3);
  get("delta2", p.delta2);
  get("delta1", p.delta1);
  get("delta0", p.delta0);
  get("d", p.d);
  get("alpha", p.alpha);
  if (doc.contains("Delta")) p.Delta = doc.at("Delta").get<int>();
  return p;
}

void save_params(const std::string& path, const ParamSet& p) {
  json doc{{"eps", p.eps},       {"eps_p", p.eps_p},   {"eps_pp", p.eps_pp},
           {"beta", p.beta},     {"delta3", p.delta3}, {"delta2", p.delta2},
           {"delta1", p.delta1}, {"delta0", p.delta0}, {"d", p.d},
           {"alpha", p.alpha},   {"Delta", p.Delta}};
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write params: " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace spreademb
