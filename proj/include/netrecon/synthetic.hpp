#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "graph_state.hpp"
#include "rng.hpp"

namespace netrecon {

// G(N, E) with E = round(N avg_degree / 2) distinct uniform pairs and
// normal(w_mean, w_sd) weights.
WeightedGraphState gen_er_weighted(int n, double avg_degree, double w_mean,
                                   double w_sd, Rng& rng);

// Planted-partition graph: nodes assigned round-robin to `blocks` groups,
// in-group pairs kept with probability p_in, cross-group pairs with p_out,
// normal(w_mean, w_sd) weights.
WeightedGraphState gen_planted_blocks(int n, int blocks, double p_in,
                                      double p_out, double w_mean, double w_sd,
                                      Rng& rng);

// Random graph reshaped to favor triangles while keeping exactly e edges:
// of e uniform edges only a 1/(rounds+1) share is kept, and each of the
// `rounds` passes closes an e/(rounds+1) batch of open triads (pairs at
// distance two), re-enumerated at the start of the pass. A pass that runs
// out of open triads falls back to uniform non-edges for the remainder and
// sets the exhausted flag.
struct EnrichedGraph {
    std::vector<std::pair<int, int>> edges;  // ascending, i < j
    bool exhausted = false;
};
EnrichedGraph gen_triangle_enriched(int n, std::int64_t e, int rounds,
                                    Rng& rng);

std::int64_t count_triangles(int n,
                             const std::vector<std::pair<int, int>>& edges);

}  // namespace netrecon
