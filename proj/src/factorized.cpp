#include "netrecon/factorized.hpp"

#include <algorithm>
#include <cmath>

#include "netrecon/errors.hpp"

namespace netrecon {

FactorizedTarget::FactorizedTarget(int n,
                                   std::vector<std::pair<int, int>> planted,
                                   double p, double eps)
    : n_(n), p_(p), eps_(eps) {
    if (n < 2) throw config_error("factorized target needs at least 2 nodes");
    if (!(0.0 < eps && eps < p && p < 1.0))
        throw config_error("factorized target needs 0 < eps < p < 1");
    for (auto& [i, j] : planted) {
        if (i > j) std::swap(i, j);
        if (i < 0 || j >= n || i == j)
            throw config_error("planted edge outside the node range");
    }
    std::sort(planted.begin(), planted.end());
    planted.erase(std::unique(planted.begin(), planted.end()), planted.end());
    edges_ = std::move(planted);
    for (const auto& [i, j] : edges_) set_.insert(key(i, j));

    double n_pairs = 0.5 * n_ * (n_ - 1);
    double e = static_cast<double>(edges_.size());
    base_ = e * std::log1p(-p_) + (n_pairs - e) * std::log1p(-eps_);
}

std::uint64_t FactorizedTarget::key(int i, int j) const {
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
}

bool FactorizedTarget::planted(int i, int j) const {
    if (i > j) std::swap(i, j);
    return set_.count(key(i, j)) != 0;
}

double FactorizedTarget::log_odds(int i, int j) const {
    double pi = marginal(i, j);
    return std::log(pi) - std::log1p(-pi);
}

double FactorizedTarget::log_prob(const WeightedGraphState& g) const {
    if (g.size() != n_)
        throw data_error("graph size does not match the factorized target");
    double lp = base_;
    g.for_each_edge([&](int i, int j, double) { lp += log_odds(i, j); });
    return lp;
}

FactorizedChain::FactorizedChain(const FactorizedTarget& target,
                                 const SelectorConfig& sel, Rng rng)
    : t_(&target), sel_(sel), rng_(rng), g_(target.n()) {}

void FactorizedChain::step() {
    ++proposed_;
    auto [i, j] = sample_entry_pair(g_, ts_, sel_, rng_, bfs_);
    bool present = g_.weight(i, j) != 0.0;
    double lfwd = log_entry_pair_prob(g_, ts_, sel_, i, j, bfs_);
    double lrev = log_entry_pair_prob(g_, ts_, sel_, i, j, bfs_,
                                      std::pair<int, int>{i, j}, !present);
    double lodds = t_->log_odds(i, j);
    double la = (present ? -lodds : lodds) + lrev - lfwd;
    if (la >= 0.0 || std::log(rng_.uniform()) < la) {
        g_.set_entry(i, j, present ? 0.0 : 1.0);
        ++accepted_;
    }
}

void FactorizedChain::sweep() {
    for (int s = 0; s < t_->n(); ++s) step();
}

void FactorizedChain::refresh_typical_set() {
    if (ts_.frozen()) return;
    auto pairs = ts_.pairs();
    auto cur = g_.edge_pairs();
    pairs.insert(pairs.end(), cur.begin(), cur.end());
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    ts_.assign(g_.size(), std::move(pairs));
}

double FactorizedChain::planted_overlap() const {
    return jaccard_edges(g_.edge_pairs(), t_->planted_edges());
}

FactorizedBenchResult run_factorized_bench(const FactorizedTarget& target,
                                           const SelectorConfig& sel,
                                           int warm_sweeps, int measure_sweeps,
                                           Rng rng) {
    FactorizedChain chain(target, sel, rng);
    for (int s = 0; s < warm_sweeps; ++s) {
        chain.sweep();
        chain.refresh_typical_set();
    }
    chain.freeze_typical_set();

    std::int64_t p0 = chain.proposed(), a0 = chain.accepted();
    FactorizedBenchResult out;
    out.trace.reserve(measure_sweeps);
    for (int s = 0; s < measure_sweeps; ++s) {
        chain.sweep();
        out.trace.push_back(chain.planted_overlap());
    }
    std::int64_t dp = chain.proposed() - p0;
    out.accept_rate =
        dp > 0 ? static_cast<double>(chain.accepted() - a0) / dp : 0.0;
    return out;
}

}  // namespace netrecon
