#pragma once

#include <cstdint>
#include <vector>

#include "netrecon/graph_state.hpp"

namespace netrecon {

struct PriorParams {
    double lambda = 1.0;   // decay of the value prior
    double delta = 1e-8;   // grid spacing shared by weights and node params
    bool hyper_updates = false;  // enable lambda moves and pay the
                                 // description cost of the two hyperparameters
};

// Hyperparameters are described as 64-bit quantities when they are free.
constexpr double HYPERPRIOR_LOG_CONST = -2.0 * 64.0 * 0.69314718055994530942;

// log probability of one nonzero grid value g under the discretized,
// zero-excluded Laplace distribution (normalized over all g != 0).
double log_quantized_laplace(std::int64_t g, double lambda, double delta);

// same with g = 0 permitted (normalized over all g).
double log_quantized_laplace_zero_ok(std::int64_t g, double lambda,
                                     double delta);

// Multiset of values described as: counts per distinct value, the two
// extreme values, the number of distinct values, and the assignment of
// values to slots. Shared by the weight prior (zero excluded, variable
// count) and the node-parameter prior (zero allowed, fixed count).
struct CategorySummary {
    std::int64_t total = 0;  // values described
    std::int64_t k = 0;      // distinct values
    std::int64_t g_min = 0, g_max = 0;
    double sum_log_m_fact = 0.0;
};

double category_bracket_log(const CategorySummary& s, const PriorParams& pp,
                            bool zero_allowed);

// Sorted bookkeeping of distinct values with multiplicities.
class ValueCategories {
  public:
    struct Cat {
        std::int64_t g;
        std::int64_t m;
    };

    explicit ValueCategories(bool zero_allowed) : zero_allowed_(zero_allowed) {}

    static ValueCategories from_weights(const WeightedGraphState& g,
                                        double delta);
    static ValueCategories from_node_params(const WeightedGraphState& g,
                                            double delta);

    const std::vector<Cat>& categories() const { return cats_; }
    std::int64_t n_categories() const {
        return static_cast<std::int64_t>(cats_.size());
    }
    std::int64_t n_values() const { return total_; }
    bool zero_allowed() const { return zero_allowed_; }

    int find(std::int64_t g) const;  // index in categories(), or -1
    std::int64_t count_of(std::int64_t g) const;

    void add_value(std::int64_t g);
    void remove_value(std::int64_t g);
    void move_value(std::int64_t g_old, std::int64_t g_new);
    // move `count` members between values; g_new may be fresh
    void rebook(std::int64_t g_old, std::int64_t g_new, std::int64_t count);

    CategorySummary summary() const;
    double log_prior(const PriorParams& pp) const;

    // log_prior after hypothetically applying the named operation, minus the
    // current log_prior; O(log K). In every transfer g_old == g_new is a
    // no-op returning 0.
    double delta_add(const PriorParams& pp, std::int64_t g) const;
    double delta_remove(const PriorParams& pp, std::int64_t g) const;
    double delta_move(const PriorParams& pp, std::int64_t g_old,
                      std::int64_t g_new) const;
    double delta_rebook(const PriorParams& pp, std::int64_t g_old,
                        std::int64_t g_new, std::int64_t count) const;

    // consistency check used by tests
    bool matches(const ValueCategories& other) const;

  private:
    CategorySummary summary_after(std::int64_t g_old, std::int64_t g_new,
                                  std::int64_t count) const;
    void transfer(std::int64_t g_old, std::int64_t g_new, std::int64_t count);

    bool zero_allowed_;
    std::vector<Cat> cats_;  // ascending by g
    std::int64_t total_ = 0;
    double sum_log_m_fact_ = 0.0;
};

// Placement prior for the dichotomized graph: a degree-corrected block
// structure with uniform hyperpriors on degrees, block affinities, the edge
// count and the partition. Group ids are persistent ints drawn from the
// fixed universe [0, n); empty groups do not exist. Moves that name an
// unused id create a fresh group under that id, which keeps reverse
// proposal probabilities well defined on the labeled state space.
class SbmState {
  public:
    explicit SbmState(const WeightedGraphState& g);  // single group
    SbmState(const WeightedGraphState& g, const std::vector<int>& labels);

    int n_nodes() const { return n_; }
    int n_groups() const { return static_cast<int>(slots_.size()); }
    int group_of(int node) const { return b_[node]; }
    const std::vector<int>& labels() const { return b_; }
    std::vector<int> group_ids() const;
    std::vector<int> members(int gid) const;
    int group_size(int gid) const { return nr_[slot_of(gid)]; }
    bool has_group(int gid) const {
        return gid >= 0 && gid < n_ && gid2slot_[gid] >= 0;
    }

    double log_prior() const;

    // presence toggle of pair (i, j); degrees and affinities update, the
    // grouping stays
    double entry_toggle_delta(bool add, int i, int j) const;
    void apply_entry_toggle(bool add, int i, int j);

    // partition operations; deltas are exact (recompute-based, O(B^2)).
    // A target_gid of -1 or any unused id means a fresh group; -1 lets the
    // state pick the id itself.
    double node_move_delta(const WeightedGraphState& g, int node,
                           int target_gid);
    // returns the group id the node ends up in
    int apply_node_move(const WeightedGraphState& g, int node, int target_gid);
    // all of gid_b joins gid_a
    void merge_groups(int gid_a, int gid_b);
    // move_out (a strict nonempty subset of gid's members) becomes a fresh
    // group; returns its id
    int split_group(const WeightedGraphState& g, int gid,
                    const std::vector<int>& move_out, int fresh_gid = -1);

    std::int64_t n_edges() const { return e_total_; }

  private:
    int slot_of(int gid) const;
    int alloc_group(int gid = -1);
    void free_group(int gid);
    void rebuild(const WeightedGraphState& g);

    int n_;
    std::vector<int> b_;          // node -> gid
    std::vector<int> gid2slot_;   // gid -> slot or -1
    std::vector<int> slots_;      // slot -> gid
    std::vector<int> free_gids_;
    std::vector<std::int64_t> nr_;           // slot -> group size
    std::vector<std::int64_t> er_;           // slot -> degree sum
    std::vector<std::vector<std::int64_t>> ers_;  // slot x slot affinities
    std::vector<std::int64_t> k_;            // node degrees
    double sum_log_k_fact_ = 0.0;
    std::int64_t e_total_ = 0;
};

}  // namespace netrecon
