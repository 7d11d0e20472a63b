#pragma once

#include <map>
#include <string>
#include <vector>

#include "spreademb/graph.hpp"
#include "spreademb/rng.hpp"

namespace spreademb {

// Constant chain for the embedding algorithm; strict ordering
// eps < epsP < epsPP < beta < delta3 < delta2 < delta1 < delta0 < min(d, alpha).
// Defaults are tuned for the desk-scale regime (N around 60, d = 1/2); they
// keep the buffers just large enough for the exceptional injection while the
// thresholds stay far enough apart for the phase-one conditions to hold.
struct ParamSet {
  double eps = 0.044;
  double eps_p = 0.0455;
  double eps_pp = 0.0465;
  double beta = 0.0475;
  double delta3 = 0.0482;
  double delta2 = 0.049;
  double delta1 = 0.0525;
  double delta0 = 0.0666;
  double d = 0.5;
  double alpha = 0.5;
  int Delta = 4;

  void validate() const;  // throws PreconditionError on a broken chain
};

// Target graph H with a homomorphism into the reduced graph and optional
// per-vertex image restrictions W_x (host vertex ids, within class h(x)).
struct TargetSpec {
  Graph H;
  std::vector<int> h;                    // V(H) -> class index
  std::vector<int> W;                    // restricted H vertices
  std::map<int, std::vector<int>> Wx;    // x in W -> allowed host vertices

  void validate(const ClassSystem& sys, const ParamSet& params) const;
};

struct EmbedFailure : std::runtime_error {
  explicit EmbedFailure(const std::string& what, std::string stage_ = "")
      : std::runtime_error(what), stage(std::move(stage_)) {}
  std::string stage;
};

// Output of preprocess: padded + augmented H with buffers and ordering.
struct PreparedInstance {
  Graph H;                  // |V(H)| = r * N after padding and augmentation
  std::vector<int> h;
  std::vector<Bitset> Wx;   // allowed host images, every H vertex
  std::vector<long long> wsize;
  std::vector<std::vector<int>> B;  // per class
  std::vector<std::vector<int>> D;
  std::vector<bool> inB, inD, in_NHD;
  std::vector<int> order;   // N_H(B) first, B last
  int n = 0, N = 0, r = 0;
  int nb_count = 0;         // |N_H(B)|
  ParamSet params;

  void check_invariants(const ClassSystem& sys) const;  // throws on violation
};

PreparedInstance preprocess(const TargetSpec& spec, const ClassSystem& sys,
                            const ParamSet& params, Rng rng);

using Embedding = std::vector<int>;  // H vertex -> host vertex, -1 unembedded

struct RunLog {
  int T = 0;                       // Phase I termination index
  int reorder_events = 0;
  int total_moved_forward = 0;
  int min_admissible = 0;          // min |A| over Phase I steps
  double min_free_candidates = 0;  // min |C(x) \ used| seen at checkpoints
  std::vector<int> exceptional_sizes;  // |E_i| per class
  std::vector<int> phase2_sizes;       // vertices left to the matching, per class
};

// Evolving quasirandom partial embedding. All candidate-set and (P1)/(P2)
// bookkeeping is incremental; `relaxed_p2` samples candidate pairs instead
// of examining every affected pair when evaluating extensions.
class EmbedState {
 public:
  EmbedState(const PreparedInstance& inst, const ClassSystem& sys,
             bool relaxed_p2 = false);

  // W_x cap common neighborhoods of embedded H-neighbors, minus nothing.
  const Bitset& candidate_set(int x) const;

  // L_j at the current j; also reorders the tail (low vertices first).
  std::vector<int> recompute_low_set();

  // Admissible images for the next vertex x = order[j]: free candidates
  // satisfying the degree condition toward unembedded neighbors and keeping
  // the extension quasirandom.
  std::vector<int> admissible_targets(int x) const;

  // The j = |N_H(B)| special step: force badly-covered free host vertices
  // onto buffer D via a random injection.
  void exceptional_step(Rng& rng);

  void phase_one(Rng rng);
  Embedding phase_two(Rng rng);  // completes B via per-class matchings

  // Direct recomputation of (P1) and the per-class (P2) exception counts;
  // used by tests to validate the incremental bookkeeping.
  bool check_p1_exact() const;
  std::vector<long long> p2_counts_exact() const;
  std::vector<long long> p2_counts() const;

  int j() const { return j_; }
  const Embedding& phi() const { return phi_; }
  const std::vector<int>& ordering() const { return order_; }
  const RunLog& log() const { return log_; }
  bool embedded(int x) const { return phi_[x] >= 0; }

  void commit(int x, int v);  // exposed for tests; x must be order_[j]

 private:
  struct ClassBook {
    std::vector<int> members;       // H_i
    std::vector<int> local;        // H vertex -> local index or -1
    std::vector<uint8_t> viol;      // local x local, unordered entries
    long long count = 0;            // ordered violating pairs, x != y
  };

  bool p2_active(int x) const;
  bool exceptional_plan(std::vector<std::vector<int>>& E,
                        std::vector<std::vector<int>>& dfree) const;
  void refresh_pairs(int y);        // recompute viol rows touching y
  void deactivate(int x);
  long long p2_extension_count(int cls, int x, int v,
                               const std::vector<int>& affected) const;
  int extension_reject(int x, int v) const;  // 0 ok, 1 (i), 2 (P1), 3 (P2)
  bool extension_ok(int x, int v) const;

  const PreparedInstance& inst_;
  const ClassSystem& sys_;
  bool relaxed_;
  int j_ = 0;
  bool exceptional_done_ = false;
  Embedding phi_;
  Bitset used_;
  std::vector<Bitset> C_;
  std::vector<int> ell_;
  std::vector<int> order_;
  std::vector<ClassBook> book_;
  std::vector<double> pow_lo_, pow_hi_;  // (d -+ eps)^l
  mutable Rng probe_rng_{0x5eadbeef, 0};  // relaxed-mode pair sampling
  RunLog log_;
};

struct EmbedResult {
  Embedding phi;
  RunLog log;
};

EmbedResult embed(const TargetSpec& spec, const ClassSystem& sys,
                  const ParamSet& params, Rng rng, bool relaxed_p2 = false);

bool verify_embedding(const TargetSpec& spec, const ClassSystem& sys,
                      const Embedding& phi);

// --- JSON serialization (CLI fixtures) ---------------------------------
TargetSpec load_target_spec(const std::string& path);
void save_target_spec(const std::string& path, const TargetSpec& spec);
ParamSet load_params(const std::string& path);
void save_params(const std::string& path, const ParamSet& params);

}  // namespace spreademb
