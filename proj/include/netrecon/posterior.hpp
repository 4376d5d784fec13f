#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "netrecon/dataset.hpp"
#include "netrecon/models.hpp"
#include "netrecon/prior.hpp"

namespace netrecon {

// Everything one chain owns: the weighted graph, the field cache, the value
// categories of weights and node parameters, the placement state, and the
// running log joint density. All mutations go through this class so the
// bookkeeping stays exact; recompute() rebuilds every component from scratch
// and reports the largest correction it had to make.
class ChainState {
  public:
    ChainState(const Dataset& X, ModelKind kind, const PriorParams& pp,
               WeightedGraphState g, std::vector<int> labels = {});

    const WeightedGraphState& graph() const { return g_; }
    const Dataset& dataset() const { return *x_; }
    ModelKind kind() const { return kind_; }
    const PriorParams& params() const { return pp_; }
    const ValueCategories& wcats() const { return wcats_; }
    const ValueCategories& tcats() const { return tcats_; }
    const SbmState& sbm() const { return sbm_; }
    const FieldCache& cache() const { return cache_; }
    int n() const { return g_.size(); }

    double log_joint() const { return joint_; }
    double log_lik() const { return ll_; }
    double log_prior_weights() const { return lp_w_; }
    double log_prior_thetas() const { return lp_t_; }
    double log_prior_placement() const { return lp_sbm_; }

    double recompute(bool resync_cache = true);

    // Scores and commits a change of one off-diagonal entry. log_ratio
    // accepts any real value (the prior side snaps to the nearest grid
    // cell); apply requires a value that is exactly on the grid. Only one
    // context may be alive at a time: they share the chain's scratch
    // buffers.
    class EntryCtx {
      public:
        int i() const { return i_; }
        int j() const { return j_; }
        double w_old() const { return w_old_; }
        double log_ratio(double w_new) const;
        void apply(double w_new);

      private:
        friend class ChainState;
        EntryCtx(ChainState& cs, int i, int j);
        ChainState* cs_;
        int i_, j_;
        double w_old_;
        std::int64_t g_old_;
        EntryEval eval_;
    };
    EntryCtx prepare_entry(int i, int j) { return EntryCtx(*this, i, j); }

    class NodeCtx {
      public:
        int i() const { return i_; }
        double theta_old() const { return th_old_; }
        double log_ratio(double th_new) const;
        void apply(double th_new);

      private:
        friend class ChainState;
        NodeCtx(ChainState& cs, int i);
        ChainState* cs_;
        int i_;
        double th_old_;
        std::int64_t g_old_;
        NodeEval eval_;
    };
    NodeCtx prepare_node(int i) { return NodeCtx(*this, i); }

    // likelihood-only scorer for compound moves; state must not change
    // while it is in use
    EdgeSetEval make_edge_eval(
        const std::vector<std::pair<int, int>>& moved,
        const std::vector<std::pair<std::pair<int, int>, double>>& pinned =
            {}) const {
        return EdgeSetEval(*x_, g_, cache_, kind_, moved, pinned);
    }

    // Commits several entry changes at once (weights of 0 remove). Values
    // must be on the grid and pairs distinct. Returns the log-joint delta.
    struct PairChange {
        int i, j;
        double w;
    };
    double apply_pairs(const std::vector<PairChange>& changes);

    // placement delta of removing then adding pairs; the state is restored
    double retoggle_delta(const std::vector<std::pair<int, int>>& removals,
                          const std::vector<std::pair<int, int>>& additions);

    // partition operations, forwarding to the placement state
    double partition_node_delta(int node, int target_gid) {
        return sbm_.node_move_delta(g_, node, target_gid);
    }
    int apply_partition_node(int node, int target_gid);
    double partition_merge_delta(int gid_a, int gid_b) const;
    void apply_partition_merge(int gid_a, int gid_b);
    double partition_split_delta(int gid, const std::vector<int>& move_out) const;
    int apply_partition_split(int gid, const std::vector<int>& move_out,
                              int fresh_gid = -1);

    // decay-rate updates (both value priors share the rate)
    double lambda_delta(double lambda_new) const;
    void apply_lambda(double lambda_new);

  private:
    friend class EntryCtx;
    friend class NodeCtx;
    void set_joint();
    void after_apply();  // periodic drift repair

    const Dataset* x_;
    ModelKind kind_;
    PriorParams pp_;
    WeightedGraphState g_;
    FieldCache cache_;
    ValueCategories wcats_{false};
    ValueCategories tcats_{true};
    SbmState sbm_;
    EvalScratch scratch_;
    double ll_ = 0, lp_w_ = 0, lp_t_ = 0, lp_sbm_ = 0, joint_ = 0;
    std::int64_t n_applied_ = 0;
};

}  // namespace netrecon
