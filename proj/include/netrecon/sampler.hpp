#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "netrecon/posterior.hpp"
#include "netrecon/proposal.hpp"
#include "netrecon/rng.hpp"

namespace netrecon {

// Everything that shapes proposals; the schedule below decides how often
// each move runs.
struct ProposalConfig {
    SelectorConfig selector;
    ReplaceConfig replace;
    ValueKernelConfig entry_value;  // weight updates
    ValueKernelConfig theta_value;  // node parameter updates, no zero atom
    BliConfig cat_bli;              // search used by whole-category moves

    // When nonempty, entry values are proposed uniformly from this list
    // instead of the fitted kernel. Only useful for small closed systems;
    // the values must sit on the grid.
    std::vector<double> restricted_values;

    double lambda_step = 0.5;  // log step of decay-rate updates
    double w_scale = 1.0;      // probe magnitude for the candidate scan
    int top_per_node = 4;      // candidate pairs kept per node by the scan
    std::int64_t scan_pair_cap = 4000000;  // above this, pairs are sampled

    ProposalConfig() {
        theta_value.zero_prob = 0.0;
        cat_bli.eps_bracket = 25.0;  // category slices are very peaked
    }
};

// Per-sweep move counts; -1 picks the scale-aware default.
struct ScheduleConfig {
    int entries = -1;     // default n
    int nodes = -1;       // default n/10
    int categories = 10;  // collective revalue + merge-split
    int partitions = 5;
    int replaces = -1;    // default n/10
    int swaps = -1;       // default n/20
    int hypers = 2;       // only acts when hyper updates are enabled
    int typical_refresh_sweeps = 10;
};

enum class MoveKind {
    entry,
    node,
    category,
    partition,
    replace,
    swap,
    hyper,
    count_
};

struct MoveStats {
    std::int64_t proposed = 0;  // includes proposals that fell through
    std::int64_t accepted = 0;
};

class Sampler {
  public:
    Sampler(ChainState& cs, const ProposalConfig& pc, const ScheduleConfig& sc,
            Rng rng);

    void sweep();

    // single proposals, exposed so tests can drive one move class at a time
    void entry_step();
    void node_step();
    void category_step();
    void partition_step();
    void replace_step();
    void swap_step();
    void hyper_step();

    void refresh_typical_set();
    const TypicalEdgeSet& typical_set() const { return ts_; }
    void set_typical_set(std::vector<std::pair<int, int>> pairs);

    const MoveStats& stats(MoveKind k) const {
        return stats_[static_cast<int>(k)];
    }
    std::int64_t sweeps_done() const { return sweeps_; }
    ChainState& chain() { return *cs_; }
    Rng& rng() { return rng_; }

  private:
    bool accept(double log_alpha);
    std::vector<std::pair<int, int>> edges_of_category(std::int64_t g) const;
    int sample_unused_gid();

    void collective_step();
    void merge_split_step();

    ChainState* cs_;
    ProposalConfig pc_;
    ScheduleConfig sc_;
    Rng rng_;
    TypicalEdgeSet ts_;
    BfsScratch bfs_;
    std::vector<double> rvals_nz_;  // restricted values without zero
    MoveStats stats_[static_cast<int>(MoveKind::count_)];
    std::int64_t sweeps_ = 0;
    int n_entries_, n_nodes_, n_replaces_, n_swaps_;
};

// Candidate scan: every pair is scored by the best posterior gain over a
// handful of probe values, and each node keeps its top_per_node best
// partners. Used both for the typical set and as the greedy scan.
std::vector<std::pair<int, int>> greedy_candidate_pairs(
    ChainState& cs, const ProposalConfig& pc, Rng& rng);

// Deterministic coordinate ascent to a local posterior maximum: repeatedly
// optimizes scanned entries and node parameters until the joint gain of a
// pass drops below tol_per_node * n. Returns the number of passes; when
// trace is given it receives the joint log posterior after each pass.
int greedy_map(ChainState& cs, const ProposalConfig& pc, int max_iters = 50,
               double tol_per_node = 1e-4, std::vector<double>* trace = nullptr);

}  // namespace netrecon
