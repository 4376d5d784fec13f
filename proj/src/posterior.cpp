#include "netrecon/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "netrecon/errors.hpp"
#include "netrecon/grid.hpp"
#include "netrecon/math_util.hpp"

namespace netrecon {

namespace {
// moves are scored at arbitrary reals but committed only on the grid
void require_on_grid(double w, double delta, const char* what) {
    if (from_grid(to_grid(w, delta), delta) != w)
        throw std::invalid_argument(std::string(what) +
                                    ": value is not on the working grid");
}

constexpr std::int64_t JOINT_REPAIR_INTERVAL = 50000;
}  // namespace

ChainState::ChainState(const Dataset& X, ModelKind kind, const PriorParams& pp,
                       WeightedGraphState g, std::vector<int> labels)
    : x_(&X),
      kind_(kind),
      pp_(pp),
      g_(std::move(g)),
      sbm_(labels.empty() ? SbmState(g_) : SbmState(g_, labels)) {
    if (pp_.delta <= 0.0 || pp_.lambda <= 0.0)
        throw config_error("prior: lambda and delta must be positive");
    if (g_.size() != X.n_nodes())
        throw data_error("graph size does not match the data");
    g_.for_each_edge([&](int, int, double w) {
        if (from_grid(to_grid(w, pp_.delta), pp_.delta) != w)
            throw data_error("initial weights must sit on the working grid");
    });
    for (int i = 0; i < g_.size(); ++i) {
        double th = g_.theta(i);
        if (from_grid(to_grid(th, pp_.delta), pp_.delta) != th)
            throw data_error(
                "initial node parameters must sit on the working grid");
        if (kind_ == ModelKind::gaussian && th <= 0.0)
            throw data_error(
                "the continuous model needs positive node parameters");
    }
    X.validate_for(kind_);
    cache_.build(g_, X);
    wcats_ = ValueCategories::from_weights(g_, pp_.delta);
    tcats_ = ValueCategories::from_node_params(g_, pp_.delta);
    ll_ = log_likelihood(X, g_, kind_);
    lp_w_ = wcats_.log_prior(pp_);
    lp_t_ = tcats_.log_prior(pp_);
    lp_sbm_ = sbm_.log_prior();
    set_joint();
}

void ChainState::set_joint() {
    joint_ = ll_ + lp_w_ + lp_t_ + lp_sbm_ +
             (pp_.hyper_updates ? HYPERPRIOR_LOG_CONST : 0.0);
}

void ChainState::after_apply() {
    if (++n_applied_ % JOINT_REPAIR_INTERVAL == 0) recompute(false);
}

double ChainState::recompute(bool resync_cache) {
    if (resync_cache) cache_.force_sync(g_, *x_);
    double ll = log_likelihood(*x_, g_, kind_);
    ValueCategories wc = ValueCategories::from_weights(g_, pp_.delta);
    ValueCategories tc = ValueCategories::from_node_params(g_, pp_.delta);
    if (!wc.matches(wcats_) || !tc.matches(tcats_))
        throw numeric_error("value categories diverged from the graph");
    SbmState sb(g_, sbm_.labels());
    double lpw = wc.log_prior(pp_);
    double lpt = tc.log_prior(pp_);
    double lps = sb.log_prior();
    double drift = std::max(
        std::max(std::abs(ll - ll_), std::abs(lpw - lp_w_)),
        std::max(std::abs(lpt - lp_t_), std::abs(lps - lp_sbm_)));
    ll_ = ll;
    lp_w_ = lpw;
    lp_t_ = lpt;
    lp_sbm_ = lps;
    sbm_ = std::move(sb);
    set_joint();
    return drift;
}

ChainState::EntryCtx::EntryCtx(ChainState& cs, int i, int j)
    : cs_(&cs),
      i_(i),
      j_(j),
      w_old_(cs.g_.weight(i, j)),
      g_old_(to_grid(w_old_, cs.pp_.delta)),
      eval_(*cs.x_, cs.g_, cs.cache_, cs.kind_, i, j, cs.scratch_) {}

double ChainState::EntryCtx::log_ratio(double w_new) const {
    const ChainState& cs = *cs_;
    if (w_new == w_old_) return 0.0;
    double q = w_new / cs.pp_.delta;
    if (!(std::abs(q) < GRID_MAX_ABS_INDEX)) return NEG_INF;
    std::int64_t g_new = std::llround(q);
    double d = eval_.delta_ll(w_new);
    if (g_new != g_old_) {
        if (g_old_ == 0) {
            d += cs.wcats_.delta_add(cs.pp_, g_new);
            d += cs.sbm_.entry_toggle_delta(true, i_, j_);
        } else if (g_new == 0) {
            d += cs.wcats_.delta_remove(cs.pp_, g_old_);
            d += cs.sbm_.entry_toggle_delta(false, i_, j_);
        } else {
            d += cs.wcats_.delta_move(cs.pp_, g_old_, g_new);
        }
    }
    return d;
}

void ChainState::EntryCtx::apply(double w_new) {
    ChainState& cs = *cs_;
    require_on_grid(w_new, cs.pp_.delta, "entry move");
    if (w_new == w_old_) return;
    std::int64_t g_new = to_grid(w_new, cs.pp_.delta);
    double dll = eval_.delta_ll(w_new);
    double dpw = 0.0, dsbm = 0.0;
    if (g_new != g_old_) {
        if (g_old_ == 0) {
            dpw = cs.wcats_.delta_add(cs.pp_, g_new);
            dsbm = cs.sbm_.entry_toggle_delta(true, i_, j_);
        } else if (g_new == 0) {
            dpw = cs.wcats_.delta_remove(cs.pp_, g_old_);
            dsbm = cs.sbm_.entry_toggle_delta(false, i_, j_);
        } else {
            dpw = cs.wcats_.delta_move(cs.pp_, g_old_, g_new);
        }
    }
    cs.g_.set_entry(i_, j_, w_new);
    cs.cache_.apply_entry_delta(cs.g_, *cs.x_, i_, j_, w_new - w_old_);
    if (g_new != g_old_) {
        if (g_old_ == 0) {
            cs.wcats_.add_value(g_new);
            cs.sbm_.apply_entry_toggle(true, i_, j_);
        } else if (g_new == 0) {
            cs.wcats_.remove_value(g_old_);
            cs.sbm_.apply_entry_toggle(false, i_, j_);
        } else {
            cs.wcats_.move_value(g_old_, g_new);
        }
    }
    cs.ll_ += dll;
    cs.lp_w_ += dpw;
    cs.lp_sbm_ += dsbm;
    cs.set_joint();
    cs.after_apply();
}

ChainState::NodeCtx::NodeCtx(ChainState& cs, int i)
    : cs_(&cs),
      i_(i),
      th_old_(cs.g_.theta(i)),
      g_old_(to_grid(th_old_, cs.pp_.delta)),
      eval_(*cs.x_, cs.g_, cs.cache_, cs.kind_, i, cs.scratch_) {}

double ChainState::NodeCtx::log_ratio(double th_new) const {
    const ChainState& cs = *cs_;
    if (th_new == th_old_) return 0.0;
    double q = th_new / cs.pp_.delta;
    if (!(std::abs(q) < GRID_MAX_ABS_INDEX)) return NEG_INF;
    std::int64_t g_new = std::llround(q);
    double d = eval_.delta_ll(th_new);
    if (g_new != g_old_) d += cs.tcats_.delta_move(cs.pp_, g_old_, g_new);
    return d;
}

void ChainState::NodeCtx::apply(double th_new) {
    ChainState& cs = *cs_;
    require_on_grid(th_new, cs.pp_.delta, "node move");
    if (th_new == th_old_) return;
    std::int64_t g_new = to_grid(th_new, cs.pp_.delta);
    double dll = eval_.delta_ll(th_new);
    if (!(dll > NEG_INF))
        throw std::invalid_argument("node move: applying a forbidden value");
    double dpt = 0.0;
    if (g_new != g_old_) dpt = cs.tcats_.delta_move(cs.pp_, g_old_, g_new);
    cs.g_.set_theta(i_, th_new);
    if (g_new != g_old_) cs.tcats_.move_value(g_old_, g_new);
    cs.ll_ += dll;
    cs.lp_t_ += dpt;
    cs.set_joint();
    cs.after_apply();
}

double ChainState::apply_pairs(const std::vector<PairChange>& changes) {
    if (changes.empty()) return 0.0;
    std::vector<std::pair<int, int>> keys;
    keys.reserve(changes.size());
    for (const auto& c : changes) {
        if (c.i == c.j) throw std::invalid_argument("apply_pairs: diagonal");
        require_on_grid(c.w, pp_.delta, "pair change");
        keys.emplace_back(std::min(c.i, c.j), std::max(c.i, c.j));
    }
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
        throw std::invalid_argument("apply_pairs: duplicate pair");

    std::vector<std::pair<std::pair<int, int>, double>> pinned;
    pinned.reserve(changes.size());
    for (const auto& c : changes) pinned.push_back({{c.i, c.j}, c.w});
    EdgeSetEval ev(*x_, g_, cache_, kind_, {}, pinned);
    double dll = ev.delta_ll(0.0);

    double lpw0 = wcats_.log_prior(pp_);
    double dsbm = 0.0;
    std::vector<std::pair<int, int>> edges;
    std::vector<double> deltas;
    for (const auto& c : changes) {
        double w_cur = g_.weight(c.i, c.j);
        if (w_cur == c.w) continue;
        std::int64_t g_cur = to_grid(w_cur, pp_.delta);
        std::int64_t g_new = to_grid(c.w, pp_.delta);
        if (g_new != g_cur) {
            if (g_cur == 0) {
                wcats_.add_value(g_new);
                dsbm += sbm_.entry_toggle_delta(true, c.i, c.j);
                sbm_.apply_entry_toggle(true, c.i, c.j);
            } else if (g_new == 0) {
                wcats_.remove_value(g_cur);
                dsbm += sbm_.entry_toggle_delta(false, c.i, c.j);
                sbm_.apply_entry_toggle(false, c.i, c.j);
            } else {
                wcats_.move_value(g_cur, g_new);
            }
        }
        g_.set_entry(c.i, c.j, c.w);
        edges.emplace_back(c.i, c.j);
        deltas.push_back(c.w - w_cur);
    }
    if (!edges.empty()) cache_.apply_edges_delta(g_, *x_, edges, deltas);
    double dpw = wcats_.log_prior(pp_) - lpw0;
    ll_ += dll;
    lp_w_ += dpw;
    lp_sbm_ += dsbm;
    set_joint();
    after_apply();
    return dll + dpw + dsbm;
}

double ChainState::retoggle_delta(
    const std::vector<std::pair<int, int>>& removals,
    const std::vector<std::pair<int, int>>& additions) {
    double d = 0.0;
    for (const auto& [i, j] : removals) {
        d += sbm_.entry_toggle_delta(false, i, j);
        sbm_.apply_entry_toggle(false, i, j);
    }
    for (const auto& [i, j] : additions) {
        d += sbm_.entry_toggle_delta(true, i, j);
        sbm_.apply_entry_toggle(true, i, j);
    }
    for (auto it = additions.rbegin(); it != additions.rend(); ++it)
        sbm_.apply_entry_toggle(false, it->first, it->second);
    for (auto it = removals.rbegin(); it != removals.rend(); ++it)
        sbm_.apply_entry_toggle(true, it->first, it->second);
    return d;
}

int ChainState::apply_partition_node(int node, int target_gid) {
    double d = sbm_.node_move_delta(g_, node, target_gid);
    int gid = sbm_.apply_node_move(g_, node, target_gid);
    lp_sbm_ += d;
    set_joint();
    return gid;
}

double ChainState::partition_merge_delta(int gid_a, int gid_b) const {
    SbmState tmp = sbm_;
    tmp.merge_groups(gid_a, gid_b);
    return tmp.log_prior() - sbm_.log_prior();
}

void ChainState::apply_partition_merge(int gid_a, int gid_b) {
    double d = partition_merge_delta(gid_a, gid_b);
    sbm_.merge_groups(gid_a, gid_b);
    lp_sbm_ += d;
    set_joint();
}

double ChainState::partition_split_delta(
    int gid, const std::vector<int>& move_out) const {
    SbmState tmp = sbm_;
    tmp.split_group(g_, gid, move_out);
    return tmp.log_prior() - sbm_.log_prior();
}

int ChainState::apply_partition_split(int gid,
                                      const std::vector<int>& move_out,
                                      int fresh_gid) {
    double d = partition_split_delta(gid, move_out);
    int fresh = sbm_.split_group(g_, gid, move_out, fresh_gid);
    lp_sbm_ += d;
    set_joint();
    return fresh;
}

double ChainState::lambda_delta(double lambda_new) const {
    if (!(lambda_new > 0.0)) return NEG_INF;
    PriorParams p2 = pp_;
    p2.lambda = lambda_new;
    return wcats_.log_prior(p2) + tcats_.log_prior(p2) - lp_w_ - lp_t_;
}

void ChainState::apply_lambda(double lambda_new) {
    if (!(lambda_new > 0.0))
        throw std::invalid_argument("lambda must be positive");
    pp_.lambda = lambda_new;
    lp_w_ = wcats_.log_prior(pp_);
    lp_t_ = tcats_.log_prior(pp_);
    set_joint();
}

}  // namespace netrecon
