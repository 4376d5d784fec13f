#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace netrecon {

// Undirected weighted graph plus one real parameter per node. Entries are
// stored once per endpoint in sorted adjacency lists; a pair is an edge
// exactly when its weight is nonzero.
class WeightedGraphState {
  public:
    explicit WeightedGraphState(int n, double theta0 = 0.0);

    int size() const { return n_; }
    std::int64_t num_edges() const { return m_edges_; }

    double weight(int i, int j) const;

    // Sets W_ij = w (w == 0 removes the edge) and returns the previous value.
    double set_entry(int i, int j, double w);

    double theta(int i) const { return theta_[check_node(i)]; }
    void set_theta(int i, double v) { theta_[check_node(i)] = v; }
    const std::vector<double>& thetas() const { return theta_; }

    int degree(int i) const {
        return static_cast<int>(adj_[check_node(i)].size());
    }
    const std::vector<std::pair<int, double>>& neighbors(int i) const {
        return adj_[check_node(i)];
    }

    // All edges as (i, j) with i < j, ascending.
    std::vector<std::pair<int, int>> edge_pairs() const;

    template <typename F>
    void for_each_edge(F&& f) const {
        for (int i = 0; i < n_; ++i)
            for (const auto& [j, w] : adj_[i])
                if (j > i) f(i, j, w);
    }

  private:
    int check_node(int i) const;
    void check_pair(int i, int j) const;

    int n_;
    std::int64_t m_edges_ = 0;
    std::vector<double> theta_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
};

// Reusable scratch for breadth-first searches; the visited array is only
// allocated once and cleared by stamp, so repeated traversals touch just the
// visited nodes.
class BfsScratch {
  public:
    // Nodes within d hops of start, excluding start itself. The result stays
    // valid until the next call on this scratch. An optional override treats
    // one pair as present/absent regardless of the graph, which lets callers
    // evaluate neighborhoods of a hypothetical post-move state.
    const std::vector<int>& reachable_set(
        const WeightedGraphState& g, int start, int d,
        std::optional<std::pair<int, int>> override_pair = std::nullopt,
        bool override_present = false);

    // Membership test for the most recent traversal.
    bool contains(int node) const {
        return node >= 0 && node < static_cast<int>(mark_.size()) &&
               mark_[node] == stamp_ && node != last_start_;
    }

  private:
    std::vector<std::uint32_t> mark_;
    std::uint32_t stamp_ = 0;
    int last_start_ = -1;
    std::vector<int> queue_;
    std::vector<int> out_;
};

// Weighted Jaccard similarity 1 - sum|a-b| / sum|a+b| over all entries.
// Both graphs empty yields NaN (0/0).
double jaccard_similarity(const WeightedGraphState& a,
                          const WeightedGraphState& b);

// Binary Jaccard |A & B| / |A | B| over edge sets.
double jaccard_edges(const std::vector<std::pair<int, int>>& a,
                     const std::vector<std::pair<int, int>>& b);

// Text formats: edge lists are "i<TAB>j<TAB>w" with i < j and 17 significant
// digits (weights round-trip bit-exactly); node parameters are "i<TAB>theta".
void write_edge_list(const std::string& path, const WeightedGraphState& g);
void read_edge_list(const std::string& path, WeightedGraphState& g);
void write_node_params(const std::string& path, const WeightedGraphState& g);
void read_node_params(const std::string& path, WeightedGraphState& g);

}  // namespace netrecon
