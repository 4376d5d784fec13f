#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "netrecon/dataset.hpp"
#include "netrecon/graph_state.hpp"
#include "netrecon/rng.hpp"

namespace netrecon {

// Local field sums f[i][m] = sum_j W_ij x_j(source of sample m), kept in
// sync incrementally as entries change and rebuilt from scratch every
// `resync_interval` accepted updates to stop drift.
class FieldCache {
  public:
    void build(const WeightedGraphState& g, const Dataset& X);

    int n_samples() const { return mc_; }
    const double* row(int i) const {
        return f_.data() + static_cast<std::size_t>(i) * mc_;
    }

    // call after the graph has been updated; dw = w_new - w_old on (i, j)
    void apply_entry_delta(const WeightedGraphState& g, const Dataset& X,
                           int i, int j, double dw);

    // several edges moving to the same value in one accepted move;
    // deltas[k] applies to edges[k]
    void apply_edges_delta(const WeightedGraphState& g, const Dataset& X,
                           const std::vector<std::pair<int, int>>& edges,
                           const std::vector<double>& deltas);

    std::int64_t accepted_since_sync() const { return accepted_; }
    void force_sync(const WeightedGraphState& g, const Dataset& X);

    std::int64_t resync_interval = 10000;

  private:
    void bump(const WeightedGraphState& g, const Dataset& X);

    int n_ = 0, mc_ = 0;
    std::vector<double> f_;
    std::int64_t accepted_ = 0;
};

// Full log-likelihood from scratch; never touches a cache. This is the
// reference the incremental paths are tested against.
double log_likelihood(const Dataset& X, const WeightedGraphState& g,
                      ModelKind kind);

// Reusable buffers for the evaluators below; keep one per chain.
struct EvalScratch {
    std::vector<double> b0, b1, b2, b3, b4, b5;
};

// Scores candidate values for one off-diagonal entry. Construction costs
// O(samples); each delta_ll call is O(samples) for Ising-family models and
// O(1) for the Gaussian model.
class EntryEval {
  public:
    EntryEval(const Dataset& X, const WeightedGraphState& g,
              const FieldCache& cache, ModelKind kind, int i, int j,
              EvalScratch& scratch);

    double w_old() const { return w_old_; }
    double delta_ll(double w_new) const;

  private:
    ModelKind kind_;
    double w_old_;
    int m_;
    // ising family
    const double* hi_ = nullptr;  // fields + theta, node i
    const double* hj_ = nullptr;
    const double* xi_ = nullptr;  // source states used as multipliers
    const double* xj_ = nullptr;
    double base_i_ = 0, base_j_ = 0;
    double lin_i_ = 0, lin_j_ = 0;  // coefficient of (w_new - w_old)
    // gaussian sufficient statistics
    double th2_i_ = 0, th2_j_ = 0;
    double a_ = 0, bi_ = 0, bj_ = 0, di_ = 0, dj_ = 0;
};

// Scores candidate values for one node parameter.
class NodeEval {
  public:
    NodeEval(const Dataset& X, const WeightedGraphState& g,
             const FieldCache& cache, ModelKind kind, int i,
             EvalScratch& scratch);

    double theta_old() const { return th_old_; }
    double delta_ll(double theta_new) const;

  private:
    ModelKind kind_;
    double th_old_;
    int m_;
    const double* h_ = nullptr;  // raw fields, no theta
    double base_ = 0;
    double lin_ = 0;
    double sxx_ = 0, sss_ = 0;  // gaussian
};

// Scores a compound change: every edge in `moved` goes to a common candidate
// value w, while every edge in `pinned` goes to its own fixed target value.
// Used by the category-level moves, whose proposals re-value whole groups of
// edges at once. Construction is O(edges * samples); evaluations are
// O(affected nodes * samples) for Ising models, O(affected nodes) Gaussian.
class EdgeSetEval {
  public:
    EdgeSetEval(const Dataset& X, const WeightedGraphState& g,
                const FieldCache& cache, ModelKind kind,
                const std::vector<std::pair<int, int>>& moved,
                const std::vector<std::pair<std::pair<int, int>, double>>&
                    pinned = {});

    double delta_ll(double w_new) const;

  private:
    struct NodeBlock {
        int node;
        double theta;
        // hq[m] = h[m] + (pinned shifts) - sum_p w_p x_p over moved partners
        // p_[m] = sum of moved-partner states; h' = hq + w_new * p_
        std::vector<double> hq, p;
        double base = 0;   // current-state log-normalizer sum
        double lin_c = 0;  // target/source cross terms, constant part
        double lin_w = 0;  // coefficient of w_new
        // gaussian: precomputed moments of (sq, p, x)
        double g_c0 = 0, g_c1 = 0, g_c2 = 0;
    };
    ModelKind kind_;
    int m_;
    std::vector<NodeBlock> blocks_;
};

// Draws a state trajectory (chain) or a batch of independent one-step
// transitions (parallel) from random uniform initial states.
Dataset simulate_kinetic_ising(const WeightedGraphState& g, int n_samples,
                               Dataset::Kind kind, Rng& rng);

// Draws iid samples from the zero-mean Gaussian whose precision matrix has
// off-diagonal W and diagonal 1/theta_i^2. Throws numeric_error if that
// matrix is not positive definite.
Dataset simulate_gaussian(const WeightedGraphState& g, int n_samples, Rng& rng);

}  // namespace netrecon
