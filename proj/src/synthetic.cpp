#include "netrecon/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "netrecon/errors.hpp"

namespace netrecon {

namespace {

std::uint64_t pack(int i, int j) {
    if (i > j) std::swap(i, j);
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
}

// distinct uniform pairs by rejection; callers keep e well below n(n-1)/2
void sample_distinct_pairs(int n, std::int64_t e,
                           std::unordered_set<std::uint64_t>& seen,
                           std::vector<std::pair<int, int>>& out, Rng& rng) {
    while (static_cast<std::int64_t>(out.size()) < e) {
        int i = rng.below_int(n);
        int j = rng.below_int(n);
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        if (!seen.insert(pack(i, j)).second) continue;
        out.emplace_back(i, j);
    }
}

}  // namespace

WeightedGraphState gen_er_weighted(int n, double avg_degree, double w_mean,
                                   double w_sd, Rng& rng) {
    if (n < 1) throw config_error("graph needs at least one node");
    if (avg_degree < 0 || avg_degree >= n - 1)
        throw config_error("average degree must be in [0, n-1)");
    auto e = static_cast<std::int64_t>(std::llround(n * avg_degree / 2.0));

    WeightedGraphState g(n);
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::pair<int, int>> edges;
    sample_distinct_pairs(n, e, seen, edges, rng);
    for (const auto& [i, j] : edges)
        g.set_entry(i, j, w_mean + w_sd * rng.normal());
    return g;
}

WeightedGraphState gen_planted_blocks(int n, int blocks, double p_in,
                                      double p_out, double w_mean, double w_sd,
                                      Rng& rng) {
    if (n < 1) throw config_error("graph needs at least one node");
    if (blocks < 1 || blocks > n)
        throw config_error("block count must be in [1, n]");
    if (p_in < 0 || p_in > 1 || p_out < 0 || p_out > 1)
        throw config_error("edge probabilities must be in [0, 1]");

    WeightedGraphState g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double p = (i % blocks == j % blocks) ? p_in : p_out;
            if (rng.uniform() < p)
                g.set_entry(i, j, w_mean + w_sd * rng.normal());
        }
    return g;
}

EnrichedGraph gen_triangle_enriched(int n, std::int64_t e, int rounds,
                                    Rng& rng) {
    if (n < 2) throw config_error("graph needs at least two nodes");
    std::int64_t max_e = static_cast<std::int64_t>(n) * (n - 1) / 2;
    if (e < 0 || e > max_e)
        throw config_error("edge count outside [0, n(n-1)/2]");
    if (rounds < 0) throw config_error("rounds must be >= 0");

    std::unordered_set<std::uint64_t> seen;
    std::vector<std::pair<int, int>> edges;
    sample_distinct_pairs(n, e, seen, edges, rng);

    EnrichedGraph out;
    if (rounds == 0 || e == 0) {
        std::sort(edges.begin(), edges.end());
        out.edges = std::move(edges);
        return out;
    }

    // keep a uniform 1/(rounds+1) share of the start edges
    std::int64_t quota = e / (rounds + 1);
    for (std::int64_t t = 0; t < quota; ++t) {
        auto pick = t + static_cast<std::int64_t>(
                            rng.below(static_cast<std::uint64_t>(e - t)));
        std::swap(edges[t], edges[pick]);
    }
    for (std::int64_t t = quota; t < e; ++t) seen.erase(pack(edges[t].first, edges[t].second));
    edges.resize(quota);

    std::vector<std::vector<int>> adj(n);
    for (const auto& [i, j] : edges) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    auto add_edge = [&](int i, int j) {
        seen.insert(pack(i, j));
        edges.emplace_back(std::min(i, j), std::max(i, j));
        adj[i].push_back(j);
        adj[j].push_back(i);
    };

    std::vector<std::pair<int, int>> open;
    std::unordered_set<std::uint64_t> open_seen;
    for (int r = 0; r < rounds; ++r) {
        // the last pass absorbs the rounding remainder so the total is e
        std::int64_t want = (r == rounds - 1)
                                ? e - static_cast<std::int64_t>(edges.size())
                                : quota;

        // pairs at distance two, enumerated once per pass
        open.clear();
        open_seen.clear();
        for (int k = 0; k < n; ++k)
            for (std::size_t a = 0; a < adj[k].size(); ++a)
                for (std::size_t b = a + 1; b < adj[k].size(); ++b) {
                    int i = adj[k][a], j = adj[k][b];
                    if (i == j) continue;
                    auto key = pack(i, j);
                    if (seen.count(key) || !open_seen.insert(key).second)
                        continue;
                    open.emplace_back(std::min(i, j), std::max(i, j));
                }

        std::int64_t have = static_cast<std::int64_t>(open.size());
        std::int64_t take = std::min(want, have);
        for (std::int64_t t = 0; t < take; ++t) {
            auto pick = t + static_cast<std::int64_t>(
                                rng.below(static_cast<std::uint64_t>(have - t)));
            std::swap(open[t], open[pick]);
            add_edge(open[t].first, open[t].second);
        }
        if (take < want) {
            out.exhausted = true;
            std::vector<std::pair<int, int>> fill;
            sample_distinct_pairs(n, want - take, seen, fill, rng);
            for (const auto& [i, j] : fill) add_edge(i, j);
        }
    }

    std::sort(edges.begin(), edges.end());
    out.edges = std::move(edges);
    return out;
}

std::int64_t count_triangles(int n,
                             const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (const auto& [i, j] : edges) {
        if (i < 0 || j >= n || i >= j)
            throw std::invalid_argument("edges must be canonical i < j");
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());

    std::int64_t count = 0;
    for (const auto& [i, j] : edges) {
        // common neighbors k with i < j < k, so each triangle counts once
        const auto& ai = adj[i];
        const auto& aj = adj[j];
        auto it = std::lower_bound(ai.begin(), ai.end(), j + 1);
        auto jt = std::lower_bound(aj.begin(), aj.end(), j + 1);
        while (it != ai.end() && jt != aj.end()) {
            if (*it < *jt)
                ++it;
            else if (*jt < *it)
                ++jt;
            else {
                ++count;
                ++it;
                ++jt;
            }
        }
    }
    return count;
}

}  // namespace netrecon
