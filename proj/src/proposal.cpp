#include "netrecon/proposal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "netrecon/grid.hpp"
#include "netrecon/math_util.hpp"

namespace netrecon {

namespace {

double lse_terms(const double* t, int n) {
    double m = NEG_INF;
    for (int k = 0; k < n; ++k) m = std::max(m, t[k]);
    if (!(m > NEG_INF)) return NEG_INF;
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += std::exp(t[k] - m);
    return m + std::log(s);
}

std::pair<int, int> canonical(int i, int j) {
    return {std::min(i, j), std::max(i, j)};
}

}  // namespace

void TypicalEdgeSet::assign(int n, std::vector<std::pair<int, int>> pairs) {
    n_ = n;
    for (auto& [i, j] : pairs) {
        if (i == j || i < 0 || j < 0 || i >= n || j >= n)
            throw std::invalid_argument("typical set: bad pair");
        if (i > j) std::swap(i, j);
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    pairs_ = std::move(pairs);
    adj_.assign(n, {});
    for (const auto& [i, j] : pairs_) {
        adj_[i].push_back(j);
        adj_[j].push_back(i);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
}

void TypicalEdgeSet::clear() {
    pairs_.clear();
    adj_.assign(n_, {});
}

bool TypicalEdgeSet::contains(int i, int j) const {
    if (i >= static_cast<int>(adj_.size())) return false;
    const auto& a = adj_[i];
    return std::binary_search(a.begin(), a.end(), j);
}

std::pair<int, int> TypicalEdgeSet::sample(Rng& rng) const {
    if (pairs_.empty()) throw std::invalid_argument("typical set: empty");
    return pairs_[rng.below(pairs_.size())];
}

std::pair<int, int> sample_entry_pair(const WeightedGraphState& g,
                                      const TypicalEdgeSet& ts,
                                      const SelectorConfig& cfg, Rng& rng,
                                      BfsScratch& bfs) {
    int n = g.size();
    if (n < 2) throw std::invalid_argument("entry pair: graph too small");
    double wt = ts.empty() ? 0.0 : cfg.w_typical;
    double total = wt + cfg.w_uniform + cfg.w_near;
    if (!(total > 0.0))
        throw std::invalid_argument("entry pair: no selector has weight");
    double u = rng.uniform() * total;
    if (u < wt) return ts.sample(rng);
    if (u < wt + cfg.w_uniform) {
        int i = static_cast<int>(rng.below(n));
        int j = static_cast<int>(rng.below(n - 1));
        if (j >= i) ++j;
        return canonical(i, j);
    }
    int i = static_cast<int>(rng.below(n));
    const auto& ball = bfs.reachable_set(g, i, cfg.bfs_depth);
    int j;
    if (ball.empty()) {
        j = static_cast<int>(rng.below(n - 1));
        if (j >= i) ++j;
    } else {
        j = ball[rng.below(ball.size())];
    }
    return canonical(i, j);
}

double log_entry_pair_prob(const WeightedGraphState& g,
                           const TypicalEdgeSet& ts, const SelectorConfig& cfg,
                           int i, int j, BfsScratch& bfs,
                           std::optional<std::pair<int, int>> override_pair,
                           bool override_present) {
    int n = g.size();
    double wt = ts.empty() ? 0.0 : cfg.w_typical;
    double total = wt + cfg.w_uniform + cfg.w_near;
    double p = 0.0;
    if (wt > 0.0 && ts.contains(i, j))
        p += wt / static_cast<double>(ts.size());
    p += cfg.w_uniform * 2.0 / (static_cast<double>(n) * (n - 1));
    if (cfg.w_near > 0.0) {
        double r = 0.0;
        {
            const auto& ball =
                bfs.reachable_set(g, i, cfg.bfs_depth, override_pair,
                                  override_present);
            if (ball.empty())
                r += 1.0 / (static_cast<double>(n) * (n - 1));
            else if (bfs.contains(j))
                r += 1.0 / (static_cast<double>(n) * ball.size());
        }
        {
            const auto& ball =
                bfs.reachable_set(g, j, cfg.bfs_depth, override_pair,
                                  override_present);
            if (ball.empty())
                r += 1.0 / (static_cast<double>(n) * (n - 1));
            else if (bfs.contains(i))
                r += 1.0 / (static_cast<double>(n) * ball.size());
        }
        p += cfg.w_near * r;
    }
    return std::log(p) - std::log(total);
}

int sample_replace_target(const WeightedGraphState& g,
                          const TypicalEdgeSet& ts, const ReplaceConfig& cfg,
                          int i, Rng& rng, BfsScratch& bfs) {
    int n = g.size();
    const auto& near = ts.partners(i);
    double pt = near.empty() ? 0.0 : cfg.p_typical;
    if (rng.uniform() < pt) return near[rng.below(near.size())];
    const auto& ball = bfs.reachable_set(g, i, cfg.bfs_depth);
    double pb = ball.empty() ? 0.0 : cfg.p_ball;
    if (rng.uniform() < pb) return ball[rng.below(ball.size())];
    int v = static_cast<int>(rng.below(n - 1));
    if (v >= i) ++v;
    return v;
}

double log_replace_target_prob(const WeightedGraphState& g,
                               const TypicalEdgeSet& ts,
                               const ReplaceConfig& cfg, int i, int v,
                               BfsScratch& bfs) {
    int n = g.size();
    const auto& near = ts.partners(i);
    double pt = near.empty() ? 0.0 : cfg.p_typical;
    double p = 0.0;
    if (pt > 0.0 && std::binary_search(near.begin(), near.end(), v))
        p += pt / static_cast<double>(near.size());
    const auto& ball = bfs.reachable_set(g, i, cfg.bfs_depth);
    double pb = ball.empty() ? 0.0 : cfg.p_ball;
    double rest = 1.0 - pt;
    if (pb > 0.0 && bfs.contains(v)) p += rest * pb / ball.size();
    p += rest * (1.0 - pb) / (n - 1);
    return std::log(p);
}

ValueKernel::ValueKernel(const std::function<double(double)>& logf,
                         const ValueKernelConfig& cfg, double delta)
    : cfg_(cfg), delta_(delta), bli_(logf, cfg.bli) {
    if (cfg_.zero_prob < 0.0 || cfg_.zero_prob >= 1.0 || cfg_.p_new < 0.0 ||
        cfg_.p_new > 1.0 || delta_ <= 0.0)
        throw std::invalid_argument("value kernel: bad mixture settings");
}

std::optional<double> ValueKernel::draw(
    Rng& rng, const std::vector<double>& cat_values) const {
    if (cfg_.zero_prob > 0.0 && rng.uniform() < cfg_.zero_prob) return 0.0;
    double p1 = cat_values.empty() ? 1.0 : cfg_.p_new;
    double w = bli_.sample(rng);
    if (rng.uniform() < p1) {
        double q = w / delta_;
        if (!(std::abs(q) < GRID_MAX_ABS_INDEX)) return std::nullopt;
        return from_grid(std::llround(q), delta_);
    }
    return cat_values[BliDensity::voronoi_index(cat_values, w)];
}

double ValueKernel::log_density(double w,
                                const std::vector<double>& cat_values) const {
    double terms[3];
    int nt = 0;
    double r = cfg_.zero_prob;
    if (w == 0.0 && r > 0.0) terms[nt++] = std::log(r);
    double q = w / delta_;
    if (!(std::abs(q) < GRID_MAX_ABS_INDEX)) return NEG_INF;
    double log_rest = std::log1p(-r);
    double p1 = cat_values.empty() ? 1.0 : cfg_.p_new;
    if (p1 > 0.0)
        terms[nt++] = log_rest + std::log(p1) +
                      bli_.log_cell_mass(std::llround(q), delta_);
    if (p1 < 1.0) {
        auto it = std::lower_bound(cat_values.begin(), cat_values.end(), w);
        if (it != cat_values.end() && *it == w)
            terms[nt++] =
                log_rest + std::log1p(-p1) +
                bli_.log_voronoi_mass(cat_values,
                                      static_cast<int>(it - cat_values.begin()));
    }
    return lse_terms(terms, nt);
}

}  // namespace netrecon
