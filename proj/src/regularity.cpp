#include "spreademb/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spreademb {

using boost::multiprecision::cpp_int;

namespace {

constexpr long long kRatScale = 1000000000LL;  // 1e9 fixed-point for eps/xi

long long to_fixed(double x) { return std::llround(x * static_cast<double>(kRatScale)); }

// |d(sub) - d(pair)| > eps, decided exactly.
// d(sub) = e1/t1, d(pair) = e/t, eps = en/kRatScale:
//   |e1*t - e*t1| * kRatScale > en * t1 * t
bool density_deviates(long long e1, long long t1, long long e, long long t,
                      long long eps_num) {
  cpp_int lhs = cpp_int(e1) * t - cpp_int(e) * t1;
  if (lhs < 0) lhs = -lhs;
  return lhs * kRatScale > cpp_int(eps_num) * t1 * t;
}

long long edges_between(const BipartitePair& pair, const std::vector<int>& xs,
                        const Bitset& ymask) {
  long long e = 0;
  for (int x : xs) e += pair.x_neighbors(x).and_count(ymask);
  return e;
}

}  // namespace

std::uint64_t second_moment_stat_serial(const BipartitePair& pair) {
  std::uint64_t s = 0;
  for (int x = 0; x < pair.nx(); ++x)
    for (int xp = 0; xp < pair.nx(); ++xp) {
      std::uint64_t c = codegree(pair, x, xp);
      s += c * c;
    }
  return s;
}

std::uint64_t second_moment_stat(const BipartitePair& pair) {
  const int nx = pair.nx();
  std::uint64_t s = 0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (int x = 0; x < nx; ++x) {
    const Bitset& row = pair.x_neighbors(x);
    std::uint64_t local = 0;
    // Ordered pairs: the diagonal counts once, off-diagonal both ways.
    for (int xp = 0; xp < nx; ++xp) {
      std::uint64_t c = row.and_count(pair.x_neighbors(xp));
      local += c * c;
    }
    s += local;
  }
  return s;
}

RegularityVerdict is_quasirandom(const BipartitePair& pair, double xi, double d0) {
  ExactDensity d = density(pair);
  long long d0_num = to_fixed(d0);
  if (cpp_int(d.edges) * kRatScale < cpp_int(d0_num) * d.total)
    throw PreconditionError("is_quasirandom: density below d0");

  RegularityVerdict v;
  v.stat = second_moment_stat(pair);

  // S <= e^4/(nx^2 ny^2) + xi nx^2 ny^2, cross-multiplied by nx^2 ny^2:
  //   S * t^2 <= e^4 + xi_num/kRatScale * t^4   with t = nx*ny
  cpp_int t = cpp_int(pair.nx()) * pair.ny();
  cpp_int e = d.edges;
  cpp_int lhs = cpp_int(v.stat) * t * t * kRatScale;
  cpp_int rhs = e * e * e * e * kRatScale + cpp_int(to_fixed(xi)) * t * t * t * t;
  v.pass = lhs <= rhs;

  double dd = d.value();
  double tt = static_cast<double>(pair.nx()) * pair.nx() * pair.ny() * pair.ny();
  v.threshold = dd * dd * dd * dd * tt + xi * tt;
  return v;
}

std::optional<IrregularityWitness> witness_irregularity(const BipartitePair& pair,
                                                        double eps, long long budget,
                                                        Rng rng) {
  if (budget < 1) throw DomainError("witness_irregularity: budget < 1");
  const int nx = pair.nx(), ny = pair.ny();
  ExactDensity d = density(pair);
  long long eps_num = to_fixed(eps);

  auto make_witness = [&](const std::vector<int>& xs, const std::vector<int>& ys) {
    Bitset ymask(ny);
    for (int y : ys) ymask.set(y);
    long long e1 = edges_between(pair, xs, ymask);
    IrregularityWitness w;
    w.xs = xs;
    w.ys = ys;
    w.sub_density = {e1, static_cast<long long>(xs.size() * ys.size())};
    w.pair_density = d;
    return w;
  };

  auto check = [&](const std::vector<int>& xs, const std::vector<int>& ys)
      -> std::optional<IrregularityWitness> {
    if (xs.empty() || ys.empty()) return std::nullopt;
    // size thresholds: |Xi| >= eps |Ai|, exact in fixed point
    if (static_cast<long long>(xs.size()) * kRatScale < eps_num * nx) return std::nullopt;
    if (static_cast<long long>(ys.size()) * kRatScale < eps_num * ny) return std::nullopt;
    Bitset ymask(ny);
    for (int y : ys) ymask.set(y);
    long long e1 = edges_between(pair, xs, ymask);
    long long t1 = static_cast<long long>(xs.size()) * ys.size();
    if (density_deviates(e1, t1, d.edges, d.total, eps_num))
      return make_witness(xs, ys);
    return std::nullopt;
  };

  if (nx + ny <= 16) {
    std::vector<int> xs, ys;
    for (unsigned mx = 1; mx < (1u << nx); ++mx) {
      xs.clear();
      for (int i = 0; i < nx; ++i)
        if (mx & (1u << i)) xs.push_back(i);
      for (unsigned my = 1; my < (1u << ny); ++my) {
        ys.clear();
        for (int i = 0; i < ny; ++i)
          if (my & (1u << i)) ys.push_back(i);
        if (auto w = check(xs, ys)) return w;
      }
    }
    return std::nullopt;
  }

  // Randomized falsifier: degree-sorted prefixes and random subsets.
  std::vector<int> xbydeg(nx), ybydeg(ny);
  std::iota(xbydeg.begin(), xbydeg.end(), 0);
  std::iota(ybydeg.begin(), ybydeg.end(), 0);
  std::sort(xbydeg.begin(), xbydeg.end(),
            [&](int a, int b) { return pair.x_degree(a) > pair.x_degree(b); });
  std::sort(ybydeg.begin(), ybydeg.end(),
            [&](int a, int b) { return pair.y_degree(a) > pair.y_degree(b); });

  int min_x = std::max<int>(1, static_cast<int>(std::ceil(eps * nx)));
  int min_y = std::max<int>(1, static_cast<int>(std::ceil(eps * ny)));

  auto random_subset = [&](int n, int sz) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    rng.shuffle(all);
    all.resize(sz);
    return all;
  };

  for (long long it = 0; it < budget; ++it) {
    int sx = min_x + static_cast<int>(rng.next_below(nx - min_x + 1));
    int sy = min_y + static_cast<int>(rng.next_below(ny - min_y + 1));
    std::vector<int> xs, ys;
    switch (it % 4) {
      case 0:  // high-degree prefixes
        xs.assign(xbydeg.begin(), xbydeg.begin() + sx);
        ys.assign(ybydeg.begin(), ybydeg.begin() + sy);
        break;
      case 1:  // low-degree suffixes
        xs.assign(xbydeg.end() - sx, xbydeg.end());
        ys.assign(ybydeg.end() - sy, ybydeg.end());
        break;
      case 2:  // mixed
        xs.assign(xbydeg.begin(), xbydeg.begin() + sx);
        ys.assign(ybydeg.end() - sy, ybydeg.end());
        break;
      default:
        xs = random_subset(nx, sx);
        ys = random_subset(ny, sy);
        break;
    }
    if (auto w = check(xs, ys)) return w;
  }
  return std::nullopt;
}

bool check_super_regular(const BipartitePair& pair, double eps, double delta) {
  if (pair.nx() != pair.ny())
    throw PreconditionError("check_super_regular: sides differ");
  const int N = pair.nx();
  long long delta_num = to_fixed(delta);
  for (int x = 0; x < N; ++x)
    if (static_cast<long long>(pair.x_degree(x)) * kRatScale < delta_num * N)
      return false;
  for (int y = 0; y < N; ++y)
    if (static_cast<long long>(pair.y_degree(y)) * kRatScale < delta_num * N)
      return false;
  ExactDensity d = density(pair);
  if (d.edges == 0) return false;
  double dd = d.value();
  double xi = eps * dd * dd * dd * dd;
  RegularityVerdict v = is_quasirandom(pair, xi, 0.0);
  if (!v.pass) return false;
  return !witness_irregularity(pair, eps, kDefaultWitnessBudget, Rng(0, 0))
              .has_value();
}

bool check_eps_super_regular(const BipartitePair& pair, double eps) {
  if (pair.nx() != pair.ny())
    throw PreconditionError("check_eps_super_regular: sides differ");
  const int N = pair.nx();
  ExactDensity d = density(pair);
  // (d - eps) N <= deg <= (d + eps) N, exact:
  //   (e/t - eps) * N <= deg  <=>  e*N*S - eps_num*t*N <= deg*t*S
  long long eps_num = to_fixed(eps);
  cpp_int lo = cpp_int(d.edges) * N * kRatScale - cpp_int(eps_num) * d.total * N;
  cpp_int hi = cpp_int(d.edges) * N * kRatScale + cpp_int(eps_num) * d.total * N;
  auto in_window = [&](int deg) {
    cpp_int v = cpp_int(deg) * d.total * kRatScale;
    return lo <= v && v <= hi;
  };
  for (int x = 0; x < N; ++x)
    if (!in_window(pair.x_degree(x))) return false;
  for (int y = 0; y < N; ++y)
    if (!in_window(pair.y_degree(y))) return false;
  if (d.edges == 0) return true;  // empty pair: constant density 0
  double dd = d.value();
  RegularityVerdict v = is_quasirandom(pair, eps * dd * dd * dd * dd, 0.0);
  return v.pass;
}

BipartitePair extract_exact_density_subgraph(const BipartitePair& pair,
                                             const ExtractionParams& params,
                                             Rng rng) {
  const int N = pair.nx();
  if (pair.ny() != N) throw PreconditionError("extract: sides differ");
  ExactDensity dens = density(pair);
  double d0 = dens.value();
  double d = params.target_density + params.slack_constant * params.epsilon;
  if (d > d0 + 1e-12)
    throw PreconditionError("extract: dbar + C*eps exceeds input density");
  if (params.target_density <= 0 || params.target_density > 1)
    throw PreconditionError("extract: bad target density");

  const long long target_edges =
      static_cast<long long>(std::floor(params.target_density * N * N + 0.5));
  const int target_deg = static_cast<int>(std::floor(d * N + 0.5));
  int cap = params.per_vertex_removal_cap;
  if (cap <= 0) cap = std::max(4, static_cast<int>(std::ceil(16.0 * params.epsilon * N)));

  // Stage 1: thin each edge independently at d/d0.
  BipartitePair out(N, N);
  out.x_labels() = pair.x_labels();
  out.y_labels() = pair.y_labels();
  double keep = d / d0;
  for (int x = 0; x < N; ++x)
    for (int y : pair.x_neighbors(x).to_indices())
      if (rng.bernoulli(keep)) out.add_edge(x, y);

  // Stage 2: snapshot low/high sets on both sides.
  double lo = (d - 2 * params.epsilon) * N;
  double hi = (d + 2 * params.epsilon) * N;
  std::vector<bool> xlow(N), xhigh(N), ylow(N), yhigh(N);
  for (int x = 0; x < N; ++x) {
    xlow[x] = out.x_degree(x) < lo;
    xhigh[x] = out.x_degree(x) > hi;
  }
  for (int y = 0; y < N; ++y) {
    ylow[y] = out.y_degree(y) < lo;
    yhigh[y] = out.y_degree(y) > hi;
  }

  // Stage 3: repair degrees of the low/high vertices against the calm middle.
  auto repair_x = [&](int x) {
    if (xlow[x] && out.x_degree(x) < target_deg) {
      std::vector<int> cands;
      for (int y : pair.x_neighbors(x).to_indices())
        if (!out.has_edge(x, y) && !ylow[y] && !yhigh[y]) cands.push_back(y);
      rng.shuffle(cands);
      for (int y : cands) {
        if (out.x_degree(x) >= target_deg) break;
        out.add_edge(x, y);
      }
    } else if (xhigh[x] && out.x_degree(x) > target_deg) {
      std::vector<int> cands;
      for (int y : out.x_neighbors(x).to_indices())
        if (!ylow[y] && !yhigh[y]) cands.push_back(y);
      rng.shuffle(cands);
      for (int y : cands) {
        if (out.x_degree(x) <= target_deg) break;
        out.remove_edge(x, y);
      }
    }
  };
  auto repair_y = [&](int y) {
    if (ylow[y] && out.y_degree(y) < target_deg) {
      std::vector<int> cands;
      for (int x = 0; x < N; ++x)
        if (pair.has_edge(x, y) && !out.has_edge(x, y) && !xlow[x] && !xhigh[x])
          cands.push_back(x);
      rng.shuffle(cands);
      for (int x : cands) {
        if (out.y_degree(y) >= target_deg) break;
        out.add_edge(x, y);
      }
    } else if (yhigh[y] && out.y_degree(y) > target_deg) {
      std::vector<int> cands = out.y_neighbors(y).to_indices();
      std::erase_if(cands, [&](int x) { return xlow[x] || xhigh[x]; });
      rng.shuffle(cands);
      for (int x : cands) {
        if (out.y_degree(y) <= target_deg) break;
        out.remove_edge(x, y);
      }
    }
  };
  for (int x = 0; x < N; ++x) repair_x(x);
  for (int y = 0; y < N; ++y) repair_y(y);

  // Stage 4: capped greedy removal down to the exact edge count.
  long long current = out.edge_count();
  if (current < target_edges)
    throw PreconditionError("extract: thinning fell below target edge count");
  std::vector<int> xrem(N, 0), yrem(N, 0);
  while (current > target_edges) {
    int best_x = -1, best_y = -1, best_hi = -1, best_lo = -1;
    for (int x = 0; x < N; ++x) {
      if (xrem[x] >= cap) continue;
      int dx = out.x_degree(x);
      for (int y : out.x_neighbors(x).to_indices()) {
        if (yrem[y] >= cap) continue;
        int dy = out.y_degree(y);
        int h = std::max(dx, dy), l = std::min(dx, dy);
        if (h > best_hi || (h == best_hi && l > best_lo)) {
          best_hi = h;
          best_lo = l;
          best_x = x;
          best_y = y;
        }
      }
    }
    if (best_x < 0)
      throw CapabilityError("extract: removal cap exhausted before target count");
    out.remove_edge(best_x, best_y);
    ++xrem[best_x];
    ++yrem[best_y];
    --current;
  }
  return out;
}

}  // namespace spreademb
