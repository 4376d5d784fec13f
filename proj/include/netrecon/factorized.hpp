#pragma once

#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "graph_state.hpp"
#include "proposal.hpp"
#include "rng.hpp"

namespace netrecon {

// Benchmark target over dichotomizations with independent entries: a pair
// carries presence probability p when it belongs to a planted graph and eps
// otherwise. Marginals are known by construction, which makes this the
// reference workload for measuring how proposal mixtures mix.
class FactorizedTarget {
  public:
    FactorizedTarget(int n, std::vector<std::pair<int, int>> planted_edges,
                     double p, double eps);

    int n() const { return n_; }
    bool planted(int i, int j) const;
    double marginal(int i, int j) const { return planted(i, j) ? p_ : eps_; }

    // ln(pi / (1 - pi)): the log-probability gain of turning the pair on
    double log_odds(int i, int j) const;

    // log probability of a dichotomization; any nonzero weight counts as
    // present
    double log_prob(const WeightedGraphState& g) const;

    const std::vector<std::pair<int, int>>& planted_edges() const {
        return edges_;
    }

  private:
    std::uint64_t key(int i, int j) const;

    int n_;
    double p_, eps_;
    double base_;  // log probability of the all-absent state
    std::vector<std::pair<int, int>> edges_;
    std::unordered_set<std::uint64_t> set_;
};

// Metropolis chain over dichotomizations of a factorized target. A step
// picks a node pair from the typical/uniform/nearby selector mixture and
// flips its presence; only the pair-selection densities enter the acceptance
// ratio because the flip itself is deterministic.
class FactorizedChain {
  public:
    FactorizedChain(const FactorizedTarget& target, const SelectorConfig& sel,
                    Rng rng);

    void step();
    void sweep();  // n steps

    const WeightedGraphState& graph() const { return g_; }
    const FactorizedTarget& target() const { return *t_; }

    // Unions the current edge set into the typical-set estimate. Freezing
    // stops further growth so the kernel becomes homogeneous.
    void refresh_typical_set();
    void freeze_typical_set() { ts_.set_frozen(true); }
    const TypicalEdgeSet& typical_set() const { return ts_; }

    // binary Jaccard similarity between current edges and the planted graph
    double planted_overlap() const;

    std::int64_t proposed() const { return proposed_; }
    std::int64_t accepted() const { return accepted_; }

  private:
    const FactorizedTarget* t_;
    SelectorConfig sel_;
    Rng rng_;
    WeightedGraphState g_;
    TypicalEdgeSet ts_;
    BfsScratch bfs_;
    std::int64_t proposed_ = 0, accepted_ = 0;
};

// Standard measurement protocol: grow the typical set for warm_sweeps with
// one refresh per sweep, freeze it, then record the planted-overlap trace
// for measure_sweeps under the now-homogeneous kernel.
struct FactorizedBenchResult {
    std::vector<double> trace;
    double accept_rate = 0;  // over the measurement phase
};
FactorizedBenchResult run_factorized_bench(const FactorizedTarget& target,
                                           const SelectorConfig& sel,
                                           int warm_sweeps, int measure_sweeps,
                                           Rng rng);

}  // namespace netrecon
