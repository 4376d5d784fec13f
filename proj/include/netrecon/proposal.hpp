#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "netrecon/bli.hpp"
#include "netrecon/graph_state.hpp"
#include "netrecon/rng.hpp"

namespace netrecon {

// Candidate pairs worth revisiting often: the union of the greedy scan's
// shortlists, refreshed between sweeps early in a run and frozen afterwards
// so that long runs stop paying the scan cost.
class TypicalEdgeSet {
  public:
    void assign(int n, std::vector<std::pair<int, int>> pairs);
    void clear();

    bool empty() const { return pairs_.empty(); }
    std::int64_t size() const { return static_cast<std::int64_t>(pairs_.size()); }
    bool contains(int i, int j) const;
    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
    std::pair<int, int> sample(Rng& rng) const;

    // safe before the first assign(), when no adjacency has been built yet
    const std::vector<int>& partners(int i) const {
        static const std::vector<int> none;
        return i < static_cast<int>(adj_.size()) ? adj_[i] : none;
    }

    bool frozen() const { return frozen_; }
    void set_frozen(bool f) { frozen_ = f; }

  private:
    int n_ = 0;
    std::vector<std::pair<int, int>> pairs_;  // canonical i < j, sorted
    std::vector<std::vector<int>> adj_;
    bool frozen_ = false;
};

// How entry proposals pick the pair to update: a mixture of the typical
// set, the uniform distribution over all pairs, and a neighborhood walk
// that picks a node and then a partner within bfs_depth hops.
struct SelectorConfig {
    double w_typical = 1.0;
    double w_uniform = 0.1;
    double w_near = 0.5;
    int bfs_depth = 2;
};

std::pair<int, int> sample_entry_pair(const WeightedGraphState& g,
                                      const TypicalEdgeSet& ts,
                                      const SelectorConfig& cfg, Rng& rng,
                                      BfsScratch& bfs);

// probability of the unordered pair under the mixture; the optional
// override evaluates the neighborhood component as if the presence of that
// pair had been flipped, which is what the reverse density of an
// edge-toggling move needs
double log_entry_pair_prob(
    const WeightedGraphState& g, const TypicalEdgeSet& ts,
    const SelectorConfig& cfg, int i, int j, BfsScratch& bfs,
    std::optional<std::pair<int, int>> override_pair = std::nullopt,
    bool override_present = false);

// Where a replaced edge's free endpoint lands: typical-set partners of the
// kept node, then nodes within bfs_depth hops, then anything.
struct ReplaceConfig {
    double p_typical = 0.5;
    double p_ball = 0.5;
    int bfs_depth = 2;
};

int sample_replace_target(const WeightedGraphState& g,
                          const TypicalEdgeSet& ts, const ReplaceConfig& cfg,
                          int i, Rng& rng, BfsScratch& bfs);

double log_replace_target_prob(const WeightedGraphState& g,
                               const TypicalEdgeSet& ts,
                               const ReplaceConfig& cfg, int i, int v,
                               BfsScratch& bfs);

// Value proposal for one entry or node parameter: an optional point mass at
// zero, otherwise the fitted density snapped either to the grid or to the
// nearest existing category value. The same fitted density serves the
// forward and the reverse direction; only the category list differs.
struct ValueKernelConfig {
    double zero_prob = 0.1;  // point mass at removal
    double p_new = 0.5;      // grid snap, vs nearest existing category
    BliConfig bli;
};

class ValueKernel {
  public:
    ValueKernel(const std::function<double(double)>& logf,
                const ValueKernelConfig& cfg, double delta);

    // cat_values must be ascending; empty disables the category component.
    // nullopt means the draw left the representable range (a null move).
    std::optional<double> draw(Rng& rng,
                               const std::vector<double>& cat_values) const;
    double log_density(double w, const std::vector<double>& cat_values) const;

    const BliDensity& density() const { return bli_; }

  private:
    ValueKernelConfig cfg_;
    double delta_;
    BliDensity bli_;
};

}  // namespace netrecon
