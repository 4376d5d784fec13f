#include "netrecon/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "netrecon/errors.hpp"
#include "netrecon/grid.hpp"
#include "netrecon/math_util.hpp"

namespace netrecon {

namespace {

constexpr double LN2 = 0.69314718055994530942;

// inner split of category moves
constexpr double CAT_P_COLLECTIVE = 0.7;

// inner split of partition moves
constexpr double PART_P_SINGLE = 0.6;
constexpr double PART_P_MERGE = 0.2;
constexpr double PART_P_SPLIT = 0.2;

std::optional<std::int64_t> snap_guarded(double v, double delta) {
    double q = v / delta;
    if (!(std::abs(q) <= GRID_MAX_ABS_INDEX)) return std::nullopt;
    return static_cast<std::int64_t>(std::llround(q));
}

std::pair<int, int> canon(int a, int b) {
    return a < b ? std::pair<int, int>{a, b} : std::pair<int, int>{b, a};
}

double lse2(double a, double b) {
    if (a == NEG_INF) return b;
    if (b == NEG_INF) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

std::vector<double> values_of(const ValueCategories& cats, double delta) {
    std::vector<double> v;
    v.reserve(cats.categories().size());
    for (const auto& c : cats.categories()) v.push_back(from_grid(c.g, delta));
    return v;
}

// category values after moving one member from g_old to g_new
std::vector<double> shifted_values(const ValueCategories& cats, double delta,
                                   std::int64_t g_old, std::int64_t g_new) {
    std::vector<double> v = values_of(cats, delta);
    if (cats.count_of(g_old) == 1) {
        double w = from_grid(g_old, delta);
        v.erase(std::lower_bound(v.begin(), v.end(), w));
    }
    if ((cats.zero_allowed() || g_new != 0) && cats.count_of(g_new) == 0) {
        double w = from_grid(g_new, delta);
        v.insert(std::lower_bound(v.begin(), v.end(), w), w);
    }
    return v;
}

std::vector<std::pair<std::pair<int, int>, double>> pin_at(
    const std::vector<std::pair<int, int>>& edges, double w) {
    std::vector<std::pair<std::pair<int, int>, double>> out;
    out.reserve(edges.size());
    for (const auto& e : edges) out.push_back({e, w});
    return out;
}

// Value draw of whole-category moves: a density fitted to the move's
// posterior slice, or a uniform pick from the fixed nonzero value list when
// the sampler runs in restricted mode. Draws snap to the grid; masses are
// per grid cell. The fitted construction depends on the objective only
// through comparisons, so forward and reverse directions build the same
// density and the stated masses are exact either way.
struct CatDraw {
    std::optional<BliDensity> fitted;
    const std::vector<double>* rset = nullptr;
    double delta = 0.0;

    std::optional<std::int64_t> sample_grid(Rng& rng) const {
        if (rset) {
            double v = (*rset)[rng.below(rset->size())];
            return to_grid(v, delta);
        }
        return snap_guarded(fitted->sample(rng), delta);
    }
    double log_cell(std::int64_t g) const {
        if (rset) {
            double v = from_grid(g, delta);
            return std::binary_search(rset->begin(), rset->end(), v)
                       ? -std::log(static_cast<double>(rset->size()))
                       : NEG_INF;
        }
        return fitted->log_cell_mass(g, delta);
    }
};

}  // namespace

Sampler::Sampler(ChainState& cs, const ProposalConfig& pc,
                 const ScheduleConfig& sc, Rng rng)
    : cs_(&cs), pc_(pc), sc_(sc), rng_(rng) {
    int n = cs.n();
    n_entries_ = sc.entries < 0 ? n : sc.entries;
    n_nodes_ = sc.nodes < 0 ? std::max(1, n / 10) : sc.nodes;
    n_replaces_ = sc.replaces < 0 ? std::max(1, n / 10) : sc.replaces;
    n_swaps_ = sc.swaps < 0 ? std::max(1, n / 20) : sc.swaps;
    double delta = cs.params().delta;
    auto& rv = pc_.restricted_values;
    for (double v : rv) {
        auto g = snap_guarded(v, delta);
        if (!g || from_grid(*g, delta) != v)
            throw config_error(
                "restricted proposal values must sit exactly on the value "
                "grid");
    }
    std::sort(rv.begin(), rv.end());
    rv.erase(std::unique(rv.begin(), rv.end()), rv.end());
    for (double v : rv)
        if (v != 0.0) rvals_nz_.push_back(v);
}

bool Sampler::accept(double log_alpha) {
    if (log_alpha >= 0.0) return true;
    return std::log(rng_.uniform()) < log_alpha;
}

std::vector<std::pair<int, int>> Sampler::edges_of_category(
    std::int64_t g) const {
    std::vector<std::pair<int, int>> out;
    double delta = cs_->params().delta;
    cs_->graph().for_each_edge([&](int i, int j, double w) {
        if (to_grid(w, delta) == g) out.push_back(canon(i, j));
    });
    return out;
}

int Sampler::sample_unused_gid() {
    const auto& sbm = cs_->sbm();
    int n = cs_->n();
    std::uint64_t r = rng_.below(
        static_cast<std::uint64_t>(n - sbm.n_groups()));
    for (int gid = 0; gid < n; ++gid) {
        if (sbm.has_group(gid)) continue;
        if (r == 0) return gid;
        --r;
    }
    throw std::logic_error("unused group id accounting is broken");
}

void Sampler::entry_step() {
    auto& cs = *cs_;
    if (cs.n() < 2) return;
    auto& st = stats_[static_cast<int>(MoveKind::entry)];
    ++st.proposed;

    const auto& g = cs.graph();
    auto [i, j] = sample_entry_pair(g, ts_, pc_.selector, rng_, bfs_);
    auto ctx = cs.prepare_entry(i, j);
    double w_old = ctx.w_old();
    double delta = cs.params().delta;

    double w_new;
    double lq_val = 0.0;  // reverse minus forward value density
    if (!pc_.restricted_values.empty()) {
        const auto& set = pc_.restricted_values;
        w_new = set[rng_.below(set.size())];
        if (w_new == w_old) return;
    } else {
        auto vals = values_of(cs.wcats(), delta);
        ValueKernel vk([&](double w) { return ctx.log_ratio(w); },
                       pc_.entry_value, delta);
        auto drawn = vk.draw(rng_, vals);
        if (!drawn) return;
        w_new = *drawn;
        if (w_new == w_old) return;
        auto vals_rev = shifted_values(cs.wcats(), delta,
                                       to_grid(w_old, delta),
                                       to_grid(w_new, delta));
        lq_val = vk.log_density(w_old, vals_rev) - vk.log_density(w_new, vals);
    }

    double lr = ctx.log_ratio(w_new);
    double lq_pair = 0.0;
    bool pres_old = w_old != 0.0, pres_new = w_new != 0.0;
    if (pres_old != pres_new) {
        // the pair-selection mixture sees a different graph after the move
        double fwd = log_entry_pair_prob(g, ts_, pc_.selector, i, j, bfs_);
        double rev = log_entry_pair_prob(g, ts_, pc_.selector, i, j, bfs_,
                                         std::pair<int, int>{i, j}, pres_new);
        lq_pair = rev - fwd;
    }

    if (accept(lr + lq_val + lq_pair)) {
        ctx.apply(w_new);
        ++st.accepted;
    }
}

void Sampler::node_step() {
    auto& cs = *cs_;
    auto& st = stats_[static_cast<int>(MoveKind::node)];
    ++st.proposed;

    int i = rng_.below_int(cs.n());
    auto ctx = cs.prepare_node(i);
    double th_old = ctx.theta_old();
    double delta = cs.params().delta;

    auto vals = values_of(cs.tcats(), delta);
    ValueKernel vk([&](double t) { return ctx.log_ratio(t); },
                   pc_.theta_value, delta);
    auto drawn = vk.draw(rng_, vals);
    if (!drawn) return;
    double th_new = *drawn;
    if (th_new == th_old) return;

    auto vals_rev = shifted_values(cs.tcats(), delta, to_grid(th_old, delta),
                                   to_grid(th_new, delta));
    double lq = vk.log_density(th_old, vals_rev) - vk.log_density(th_new, vals);
    if (accept(ctx.log_ratio(th_new) + lq)) {
        ctx.apply(th_new);
        ++st.accepted;
    }
}

void Sampler::category_step() {
    ++stats_[static_cast<int>(MoveKind::category)].proposed;
    if (rng_.coin(CAT_P_COLLECTIVE))
        collective_step();
    else
        merge_split_step();
}

void Sampler::collective_step() {
    auto& cs = *cs_;
    auto& st = stats_[static_cast<int>(MoveKind::category)];
    const auto& wc = cs.wcats();
    const auto& pp = cs.params();
    std::int64_t K = wc.n_categories();
    if (K == 0) return;
    bool restricted = !pc_.restricted_values.empty();
    if (restricted && rvals_nz_.empty()) return;

    auto cat = wc.categories()[rng_.below(static_cast<std::uint64_t>(K))];
    auto edges = edges_of_category(cat.g);
    auto esev = cs.make_edge_eval(edges);
    double delta = pp.delta;

    // the zero cell is off limits for every category objective here and
    // below: weight categories cannot book the empty value, and category
    // moves never delete edges
    auto objective = [&](double v) {
        auto gv = snap_guarded(v, delta);
        if (!gv || *gv == 0) return NEG_INF;
        return esev.delta_ll(v) + wc.delta_rebook(pp, cat.g, *gv, cat.m);
    };
    CatDraw draw{std::nullopt, restricted ? &rvals_nz_ : nullptr, delta};
    if (!restricted) draw.fitted.emplace(objective, pc_.cat_bli);

    auto gz = draw.sample_grid(rng_);
    if (!gz || *gz == cat.g || *gz == 0) return;
    if (wc.count_of(*gz) != 0) return;  // another category sits there
    double zv = from_grid(*gz, delta);

    // the per-category pick is 1/K in both directions: the old value dies
    // and the new one is fresh, so the category count is unchanged
    double lr = esev.delta_ll(zv) + wc.delta_rebook(pp, cat.g, *gz, cat.m);
    double lq = draw.log_cell(cat.g) - draw.log_cell(*gz);
    if (accept(lr + lq)) {
        std::vector<ChainState::PairChange> changes;
        changes.reserve(edges.size());
        for (auto [a, b] : edges) changes.push_back({a, b, zv});
        cs.apply_pairs(changes);
        ++st.accepted;
    }
}

void Sampler::merge_split_step() {
    auto& cs = *cs_;
    auto& st = stats_[static_cast<int>(MoveKind::category)];
    const auto& wc = cs.wcats();
    const auto& pp = cs.params();
    double delta = pp.delta;
    std::int64_t K = wc.n_categories();
    bool restricted = !pc_.restricted_values.empty();
    if (restricted && rvals_nz_.empty()) return;
    const std::vector<double>* rset = restricted ? &rvals_nz_ : nullptr;

    double lp0 = wc.log_prior(pp);
    // prior change of moving mb members of gb to gb2, then ma of ga to ga2
    auto prior2 = [&](std::int64_t gb, std::int64_t gb2, std::int64_t mb,
                      std::int64_t ga, std::int64_t ga2, std::int64_t ma) {
        ValueCategories t = wc;
        t.rebook(gb, gb2, mb);
        t.rebook(ga, ga2, ma);
        return t.log_prior(pp) - lp0;
    };

    bool do_merge = rng_.coin(0.5);
    if (do_merge) {
        if (K < 2) return;
        std::uint64_t ai = rng_.below(static_cast<std::uint64_t>(K));
        std::uint64_t bi = rng_.below(static_cast<std::uint64_t>(K - 1));
        if (bi >= ai) ++bi;
        auto ca = wc.categories()[ai];
        auto cb = wc.categories()[bi];
        auto edges_a = edges_of_category(ca.g);
        auto edges_b = edges_of_category(cb.g);
        std::int64_t m = ca.m + cb.m;

        auto moved = edges_a;
        moved.insert(moved.end(), edges_b.begin(), edges_b.end());
        auto esev = cs.make_edge_eval(moved);
        auto f_merged = [&](double v) {
            auto gv = snap_guarded(v, delta);
            if (!gv || *gv == 0) return NEG_INF;
            return esev.delta_ll(v) + prior2(cb.g, *gv, cb.m, ca.g, *gv, ca.m);
        };
        CatDraw dm{std::nullopt, rset, delta};
        if (!restricted) dm.fitted.emplace(f_merged, pc_.cat_bli);

        auto gz = dm.sample_grid(rng_);
        if (!gz || *gz == 0) return;
        if (wc.count_of(*gz) != 0 && *gz != ca.g && *gz != cb.g) return;
        double zv = from_grid(*gz, delta);

        double lr = esev.delta_ll(zv) + prior2(cb.g, *gz, cb.m, ca.g, *gz, ca.m);
        // both ordered picks of {a, b} make this transition
        double lq_fwd = std::log(0.5) + LN2 -
                        std::log(static_cast<double>(K)) -
                        std::log(static_cast<double>(K - 1)) + dm.log_cell(*gz);

        // reverse: split the merged category back into exactly these member
        // sets; the two part orderings are distinct sampling routes
        auto cell_of = [&](const std::vector<std::pair<int, int>>& part,
                           std::int64_t g_part, std::int64_t m_part,
                           const std::vector<std::pair<int, int>>& other,
                           std::int64_t g_other_from, std::int64_t g_other_to,
                           std::int64_t m_other, std::int64_t target) {
            if (rset) {
                double v = from_grid(target, delta);
                return std::binary_search(rset->begin(), rset->end(), v)
                           ? -std::log(static_cast<double>(rset->size()))
                           : NEG_INF;
            }
            auto ev = cs.make_edge_eval(
                part, pin_at(other, from_grid(g_other_to, delta)));
            auto f = [&](double v) {
                auto gv = snap_guarded(v, delta);
                if (!gv || *gv == 0) return NEG_INF;
                return ev.delta_ll(v) + prior2(g_other_from, g_other_to,
                                               m_other, g_part, *gv, m_part);
            };
            return BliDensity(f, pc_.cat_bli).log_cell_mass(target, delta);
        };
        // route 1: part A drawn first (other part still at the merged
        // value), then part B with A already back at its value
        double r1 = cell_of(edges_a, ca.g, ca.m, edges_b, cb.g, *gz, cb.m,
                            ca.g) +
                    cell_of(edges_b, cb.g, cb.m, edges_a, ca.g, ca.g, ca.m,
                            cb.g);
        double r2 = cell_of(edges_b, cb.g, cb.m, edges_a, ca.g, *gz, ca.m,
                            cb.g) +
                    cell_of(edges_a, ca.g, ca.m, edges_b, cb.g, cb.g, cb.m,
                            ca.g);
        double lq_rev = std::log(0.5) -
                        std::log(static_cast<double>(K - 1)) -
                        static_cast<double>(m) * LN2 + lse2(r1, r2);

        if (accept(lr + lq_rev - lq_fwd)) {
            std::vector<ChainState::PairChange> changes;
            changes.reserve(moved.size());
            for (auto [a, b] : moved) changes.push_back({a, b, zv});
            cs.apply_pairs(changes);
            ++st.accepted;
        }
    } else {
        if (K == 0) return;
        auto cat = wc.categories()[rng_.below(static_cast<std::uint64_t>(K))];
        if (cat.m < 2) return;
        auto edges = edges_of_category(cat.g);
        std::vector<std::pair<int, int>> part_a, part_b;
        for (const auto& e : edges)
            (rng_.coin(0.5) ? part_a : part_b).push_back(e);
        if (part_a.empty() || part_b.empty()) return;
        std::int64_t ma = static_cast<std::int64_t>(part_a.size());
        std::int64_t mb = static_cast<std::int64_t>(part_b.size());

        // first value: part A moves while part B stays put
        auto esev_a = cs.make_edge_eval(part_a);
        auto f1 = [&](double v) {
            auto gv = snap_guarded(v, delta);
            if (!gv || *gv == 0) return NEG_INF;
            return esev_a.delta_ll(v) + wc.delta_rebook(pp, cat.g, *gv, ma);
        };
        CatDraw d1{std::nullopt, rset, delta};
        if (!restricted) d1.fitted.emplace(f1, pc_.cat_bli);
        auto g1 = d1.sample_grid(rng_);
        if (!g1 || *g1 == 0) return;
        if (wc.count_of(*g1) != 0 && *g1 != cat.g) return;
        double z1 = from_grid(*g1, delta);

        // second value: part B moves with part A pinned at its new value
        auto esev_b = cs.make_edge_eval(part_b, pin_at(part_a, z1));
        auto f2 = [&](double v) {
            auto gv = snap_guarded(v, delta);
            if (!gv || *gv == 0) return NEG_INF;
            return esev_b.delta_ll(v) + prior2(cat.g, *g1, ma, cat.g, *gv, mb);
        };
        CatDraw d2{std::nullopt, rset, delta};
        if (!restricted) d2.fitted.emplace(f2, pc_.cat_bli);
        auto g2 = d2.sample_grid(rng_);
        if (!g2 || *g2 == 0 || *g2 == *g1) return;
        if (wc.count_of(*g2) != 0 && *g2 != cat.g) return;
        double z2 = from_grid(*g2, delta);

        // f2 already scores the whole move: its evaluator carries part A
        // pinned at z1 and its prior term rebooks both parts, so adding
        // f1(z1) would count part A's change twice
        double lr = f2(z2);

        // the flipped part ordering reaches the same state: B drawn first
        // against the untouched category, then A against B's new value
        double r1 = d1.log_cell(*g1) + d2.log_cell(*g2);
        double r2;
        if (restricted) {
            r2 = d1.log_cell(*g2) + d2.log_cell(*g1);
        } else {
            auto esev_b0 = cs.make_edge_eval(part_b);
            auto f1b = [&](double v) {
                auto gv = snap_guarded(v, delta);
                if (!gv || *gv == 0) return NEG_INF;
                return esev_b0.delta_ll(v) +
                       wc.delta_rebook(pp, cat.g, *gv, mb);
            };
            auto esev_a2 = cs.make_edge_eval(part_a, pin_at(part_b, z2));
            auto f2b = [&](double v) {
                auto gv = snap_guarded(v, delta);
                if (!gv || *gv == 0) return NEG_INF;
                return esev_a2.delta_ll(v) +
                       prior2(cat.g, *g2, mb, cat.g, *gv, ma);
            };
            r2 = BliDensity(f1b, pc_.cat_bli).log_cell_mass(*g2, delta) +
                 BliDensity(f2b, pc_.cat_bli).log_cell_mass(*g1, delta);
        }
        double lq_fwd = std::log(0.5) - std::log(static_cast<double>(K)) -
                        static_cast<double>(cat.m) * LN2 + lse2(r1, r2);

        // reverse: merge the two freshly split categories back; the merged
        // slice has the same shape from either side, so fit it here
        double rev_cell;
        if (rset) {
            double v = from_grid(cat.g, delta);
            rev_cell = std::binary_search(rset->begin(), rset->end(), v)
                           ? -std::log(static_cast<double>(rset->size()))
                           : NEG_INF;
        } else {
            auto esev_all = cs.make_edge_eval(edges);
            auto fm = [&](double v) {
                auto gv = snap_guarded(v, delta);
                if (!gv || *gv == 0) return NEG_INF;
                return esev_all.delta_ll(v) +
                       wc.delta_rebook(pp, cat.g, *gv, cat.m);
            };
            rev_cell =
                BliDensity(fm, pc_.cat_bli).log_cell_mass(cat.g, delta);
        }
        double lq_rev = std::log(0.5) + LN2 -
                        std::log(static_cast<double>(K + 1)) -
                        std::log(static_cast<double>(K)) + rev_cell;

        if (accept(lr + lq_rev - lq_fwd)) {
            std::vector<ChainState::PairChange> changes;
            changes.reserve(edges.size());
            for (auto [a, b] : part_a) changes.push_back({a, b, z1});
            for (auto [a, b] : part_b) changes.push_back({a, b, z2});
            cs.apply_pairs(changes);
            ++st.accepted;
        }
    }
}

void Sampler::partition_step() {
    auto& cs = *cs_;
    auto& st = stats_[static_cast<int>(MoveKind::partition)];
    ++st.proposed;
    const auto& sbm = cs.sbm();
    int n = cs.n();
    int B = sbm.n_groups();
    double u = rng_.uniform();
    if (u < PART_P_SINGLE) {
        int i = rng_.below_int(n);
        int old_gid = sbm.group_of(i);
        int old_size = sbm.group_size(old_gid);
        int pick = rng_.below_int(B + 1);
        if (pick == B) {
            // fresh group under a uniformly chosen unused id
            if (old_size == 1) return;  // relabeling, not a move
            int gid = sample_unused_gid();
            double d = cs.partition_node_delta(i, gid);
            double lq = -std::log(static_cast<double>(B + 2)) +
                        std::log(static_cast<double>(B + 1)) +
                        std::log(static_cast<double>(n - B));
            if (accept(d + lq)) {
                cs.apply_partition_node(i, gid);
                ++st.accepted;
            }
        } else {
            int target = sbm.group_ids()[pick];
            if (target == old_gid) return;
            double d = cs.partition_node_delta(i, target);
            double lq;
            if (old_size == 1) {
                // the old group dies; the reverse move recreates it as a
                // fresh group under exactly its id
                lq = -std::log(static_cast<double>(B)) -
                     std::log(static_cast<double>(n - B + 1)) +
                     std::log(static_cast<double>(B + 1));
            } else {
                lq = 0.0;  // group count unchanged, menus match
            }
            if (accept(d + lq)) {
                cs.apply_partition_node(i, target);
                ++st.accepted;
            }
        }
    } else if (u < PART_P_SINGLE + PART_P_MERGE) {
        if (B < 2) return;
        auto ids = sbm.group_ids();
        std::uint64_t ai = rng_.below(static_cast<std::uint64_t>(B));
        std::uint64_t bi = rng_.below(static_cast<std::uint64_t>(B - 1));
        if (bi >= ai) ++bi;
        int gid_a = ids[ai], gid_b = ids[bi];
        std::int64_t m =
            sbm.group_size(gid_a) + sbm.group_size(gid_b);
        double d = cs.partition_merge_delta(gid_a, gid_b);
        double lq_fwd = std::log(PART_P_MERGE) -
                        std::log(static_cast<double>(B)) -
                        std::log(static_cast<double>(B - 1));
        // reverse: split the merged group so the moved-out part gets back
        // gid_b; one coin pattern and one fresh-id pick do that
        double lq_rev = std::log(PART_P_SPLIT) -
                        std::log(static_cast<double>(B - 1)) -
                        static_cast<double>(m) * LN2 -
                        std::log(static_cast<double>(n - B + 1));
        if (accept(d + lq_rev - lq_fwd)) {
            cs.apply_partition_merge(gid_a, gid_b);
            ++st.accepted;
        }
    } else {
        auto ids = sbm.group_ids();
        int gid = ids[rng_.below(static_cast<std::uint64_t>(B))];
        std::int64_t sz = sbm.group_size(gid);
        if (sz < 2) return;
        auto mem = sbm.members(gid);
        std::vector<int> move_out;
        for (int node : mem)
            if (rng_.coin(0.5)) move_out.push_back(node);
        if (move_out.empty() ||
            static_cast<std::int64_t>(move_out.size()) == sz)
            return;
        int fresh = sample_unused_gid();
        double d = cs.partition_split_delta(gid, move_out);
        double lq_fwd = std::log(PART_P_SPLIT) -
                        std::log(static_cast<double>(B)) -
                        static_cast<double>(sz) * LN2 -
                        std::log(static_cast<double>(n - B));
        double lq_rev = std::log(PART_P_MERGE) -
                        std::log(static_cast<double>(B + 1)) -
                        std::log(static_cast<double>(B));
        if (accept(d + lq_rev - lq_fwd)) {
            cs.apply_partition_split(gid, move_out, fresh);
            ++st.accepted;
        }
    }
}

void Sampler::replace_step() {
    auto& cs = *cs_;
    auto& st = stats_[static_cast<int>(MoveKind::replace)];
    ++st.proposed;
    const auto& g = cs.graph();
    int n = cs.n();
    if (n < 3) return;
    int i = rng_.below_int(n);
    const auto& nbrs = g.neighbors(i);
    if (nbrs.empty()) return;
    auto [j, w] = nbrs[rng_.below(nbrs.size())];
    int v = sample_replace_target(g, ts_, pc_.replace, i, rng_, bfs_);
    if (v == j) return;
    if (g.weight(i, v) != 0.0) return;

    auto old_pair = canon(i, j), new_pair = canon(i, v);
    auto esev = cs.make_edge_eval({}, {{old_pair, 0.0}, {new_pair, w}});
    double lr = esev.delta_ll(0.0) + cs.retoggle_delta({old_pair}, {new_pair});

    // node and neighbor-slot picks cancel: the degree of i is unchanged
    double lq_fwd = log_replace_target_prob(g, ts_, pc_.replace, i, v, bfs_);
    WeightedGraphState g2 = g;
    g2.set_entry(i, j, 0.0);
    g2.set_entry(i, v, w);
    double lq_rev = log_replace_target_prob(g2, ts_, pc_.replace, i, j, bfs_);

    if (accept(lr + lq_rev - lq_fwd)) {
        cs.apply_pairs({{old_pair.first, old_pair.second, 0.0},
                        {new_pair.first, new_pair.second, w}});
        ++st.accepted;
    }
}

void Sampler::swap_step() {
    auto& cs = *cs_;
    auto& st = stats_[static_cast<int>(MoveKind::swap)];
    ++st.proposed;
    const auto& g = cs.graph();
    std::int64_t E = g.num_edges();
    if (E < 2) return;
    std::uint64_t q1 = rng_.below(static_cast<std::uint64_t>(E));
    std::uint64_t q2 = rng_.below(static_cast<std::uint64_t>(E - 1));
    if (q2 >= q1) ++q2;
    int a = -1, b = -1, c = -1, d = -1;
    double w1 = 0.0, w2 = 0.0;
    std::uint64_t idx = 0;
    g.for_each_edge([&](int ei, int ej, double ew) {
        if (idx == q1) {
            a = ei;
            b = ej;
            w1 = ew;
        } else if (idx == q2) {
            c = ei;
            d = ej;
            w2 = ew;
        }
        ++idx;
    });
    if (a == c || a == d || b == c || b == d) return;

    // rewire across the orientation coin, assign weights across the second
    int pb = rng_.coin(0.5) ? c : d;
    int qb = pb == c ? d : c;
    auto e1 = canon(a, pb), e2 = canon(b, qb);
    if (g.weight(e1.first, e1.second) != 0.0 ||
        g.weight(e2.first, e2.second) != 0.0)
        return;
    double wa = w1, wb = w2;
    if (rng_.coin(0.5)) std::swap(wa, wb);

    auto old1 = canon(a, b), old2 = canon(c, d);
    auto esev = cs.make_edge_eval(
        {}, {{old1, 0.0}, {old2, 0.0}, {e1, wa}, {e2, wb}});
    double lr =
        esev.delta_ll(0.0) + cs.retoggle_delta({old1, old2}, {e1, e2});

    // the proposal is symmetric: the reverse picks the two new edges, the
    // restoring orientation and the restoring weight assignment with the
    // same probabilities, including the doubling when the weights are equal
    if (accept(lr)) {
        cs.apply_pairs({{old1.first, old1.second, 0.0},
                        {old2.first, old2.second, 0.0},
                        {e1.first, e1.second, wa},
                        {e2.first, e2.second, wb}});
        ++st.accepted;
    }
}

void Sampler::hyper_step() {
    auto& cs = *cs_;
    if (!cs.params().hyper_updates) return;
    auto& st = stats_[static_cast<int>(MoveKind::hyper)];
    ++st.proposed;
    double lam = cs.params().lambda;
    double lam2 = lam * std::exp(pc_.lambda_step * rng_.uniform_in(-0.5, 0.5));
    // log-scale random walk; the asymmetry is the usual scale factor
    if (accept(cs.lambda_delta(lam2) + std::log(lam2 / lam))) {
        cs.apply_lambda(lam2);
        ++st.accepted;
    }
}

void Sampler::refresh_typical_set() {
    auto cand = greedy_candidate_pairs(*cs_, pc_, rng_);
    auto pairs = ts_.pairs();
    pairs.insert(pairs.end(), cand.begin(), cand.end());
    // pairs the chain currently holds are typical by demonstration, even
    // when they rank below the scan's per-node cutoff
    auto held = cs_->graph().edge_pairs();
    pairs.insert(pairs.end(), held.begin(), held.end());
    ts_.assign(cs_->n(), std::move(pairs));
}

void Sampler::set_typical_set(std::vector<std::pair<int, int>> pairs) {
    ts_.assign(cs_->n(), std::move(pairs));
}

void Sampler::sweep() {
    if (!ts_.frozen()) {
        if (sweeps_ < sc_.typical_refresh_sweeps)
            refresh_typical_set();
        else
            ts_.set_frozen(true);
    }
    for (int t = 0; t < n_entries_; ++t) entry_step();
    for (int t = 0; t < n_nodes_; ++t) node_step();
    for (int t = 0; t < sc_.categories; ++t) category_step();
    for (int t = 0; t < sc_.partitions; ++t) partition_step();
    for (int t = 0; t < n_replaces_; ++t) replace_step();
    for (int t = 0; t < n_swaps_; ++t) swap_step();
    for (int t = 0; t < sc_.hypers; ++t) hyper_step();
    ++sweeps_;
}

std::vector<std::pair<int, int>> greedy_candidate_pairs(
    ChainState& cs, const ProposalConfig& pc, Rng& rng) {
    int n = cs.n();
    if (n < 2) return {};
    double delta = cs.params().delta;
    std::vector<double> probes = values_of(cs.wcats(), delta);
    probes.push_back(snap_to_grid(pc.w_scale, delta));
    probes.push_back(snap_to_grid(-pc.w_scale, delta));
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

    int k = std::max(1, pc.top_per_node);
    std::vector<std::vector<std::pair<double, int>>> best(n);
    auto offer = [&](int node, double s, int partner) {
        auto& v = best[node];
        if (static_cast<int>(v.size()) < k) {
            v.emplace_back(s, partner);
            return;
        }
        int worst = 0;
        for (int t = 1; t < k; ++t)
            if (v[t].first < v[worst].first) worst = t;
        if (s > v[worst].first) v[worst] = {s, partner};
    };
    auto score_pair = [&](int i, int j) {
        auto ctx = cs.prepare_entry(i, j);
        double sc = NEG_INF;
        for (double p : probes) sc = std::max(sc, ctx.log_ratio(p));
        offer(i, sc, j);
        offer(j, sc, i);
    };

    std::int64_t total = static_cast<std::int64_t>(n) * (n - 1) / 2;
    if (total <= pc.scan_pair_cap) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) score_pair(i, j);
    } else {
        for (std::int64_t t = 0; t < pc.scan_pair_cap; ++t) {
            int i = rng.below_int(n);
            int j = rng.below_int(n - 1);
            if (j >= i) ++j;
            auto [x, y] = canon(i, j);
            score_pair(x, y);
        }
    }

    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i)
        for (const auto& [s, p] : best[i]) {
            (void)s;
            out.push_back(canon(i, p));
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int greedy_map(ChainState& cs, const ProposalConfig& pc, int max_iters,
               double tol_per_node, std::vector<double>* trace) {
    // scan subsampling gets a fixed stream so the search is deterministic
    Rng rng(0x6e726563ULL, 0);
    BliConfig bcfg = pc.entry_value.bli;
    double delta = cs.params().delta;
    int pass = 0;
    while (pass < max_iters) {
        ++pass;
        double gain = 0.0;
        auto cand = greedy_candidate_pairs(cs, pc, rng);
        for (auto [i, j] : cand) {
            auto ctx = cs.prepare_entry(i, j);
            double opt = bli_optimize(
                [&](double w) { return ctx.log_ratio(w); }, bcfg, 24);
            double best_w = ctx.w_old(), best_r = 0.0;
            auto consider = [&](double w) {
                double r = ctx.log_ratio(w);
                if (r > best_r + 1e-12) {
                    best_r = r;
                    best_w = w;
                }
            };
            if (auto gs = snap_guarded(opt, delta)) {
                consider(from_grid(*gs, delta));
                consider(from_grid(*gs + 1, delta));
                consider(from_grid(*gs - 1, delta));
            }
            consider(0.0);
            if (best_w != ctx.w_old()) {
                ctx.apply(best_w);
                gain += best_r;
            }
        }
        for (int i = 0; i < cs.n(); ++i) {
            auto ctx = cs.prepare_node(i);
            double opt = bli_optimize(
                [&](double t) { return ctx.log_ratio(t); }, bcfg, 24);
            double best_t = ctx.theta_old(), best_r = 0.0;
            if (auto gs = snap_guarded(opt, delta)) {
                for (std::int64_t gg : {*gs - 1, *gs, *gs + 1}) {
                    double t = from_grid(gg, delta);
                    double r = ctx.log_ratio(t);
                    if (r > best_r + 1e-12) {
                        best_r = r;
                        best_t = t;
                    }
                }
            }
            if (best_t != ctx.theta_old()) {
                ctx.apply(best_t);
                gain += best_r;
            }
        }
        if (trace) trace->push_back(cs.log_joint());
        if (gain < tol_per_node * cs.n()) break;
    }
    return pass;
}

}  // namespace netrecon
