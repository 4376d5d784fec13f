#include "netrecon/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>

#include "netrecon/config.hpp"
#include "netrecon/dataset.hpp"
#include "netrecon/errors.hpp"
#include "netrecon/estimators.hpp"
#include "netrecon/factorized.hpp"
#include "netrecon/graph_state.hpp"
#include "netrecon/manifest.hpp"
#include "netrecon/models.hpp"
#include "netrecon/posterior.hpp"
#include "netrecon/sampler.hpp"
#include "netrecon/synthetic.hpp"

namespace netrecon {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void ensure_parent_dir(const std::string& path) {
    auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

PriorParams parse_prior(const ConfigView& root) {
    ConfigView v = root.sub("params");
    PriorParams pp;
    pp.delta = v.num("delta");
    pp.lambda = v.num("lambda", 1.0);
    pp.hyper_updates = v.flag("hyper_updates", false);
    if (!(pp.delta > 0)) throw config_error("params.delta must be > 0");
    if (!(pp.lambda > 0)) throw config_error("params.lambda must be > 0");
    return pp;
}

SelectorConfig parse_selector(const ConfigView& v, SelectorConfig sel) {
    sel.w_typical = v.num("w_typical", sel.w_typical);
    sel.w_uniform = v.num("w_uniform", sel.w_uniform);
    sel.w_near = v.num("w_near", sel.w_near);
    sel.bfs_depth = static_cast<int>(v.integer("bfs_depth", sel.bfs_depth));
    if (sel.w_typical < 0 || sel.w_uniform < 0 || sel.w_near < 0 ||
        sel.w_typical + sel.w_uniform + sel.w_near <= 0)
        throw config_error(v.path() +
                           ": selector weights must be >= 0 and not all zero");
    return sel;
}

ProposalConfig parse_proposals(const ConfigView& root) {
    ProposalConfig pc;
    if (!root.has("proposals")) return pc;
    ConfigView v = root.sub("proposals");
    pc.selector = parse_selector(v, pc.selector);
    pc.replace.p_typical = v.num("replace_p_typical", pc.replace.p_typical);
    pc.replace.p_ball = v.num("replace_p_ball", pc.replace.p_ball);
    pc.replace.bfs_depth = pc.selector.bfs_depth;
    pc.entry_value.zero_prob = v.num("zero_prob", pc.entry_value.zero_prob);
    pc.entry_value.p_new = v.num("p_new", pc.entry_value.p_new);
    int nb = static_cast<int>(v.integer("n_bisect", pc.entry_value.bli.n_bisect));
    pc.entry_value.bli.n_bisect = nb;
    pc.theta_value.bli.n_bisect = nb;
    pc.cat_bli.n_bisect = nb;
    pc.restricted_values = v.num_list("restricted_values");
    pc.lambda_step = v.num("lambda_step", pc.lambda_step);
    pc.w_scale = v.num("w_scale", pc.w_scale);
    pc.top_per_node = static_cast<int>(v.integer("top_per_node", pc.top_per_node));
    pc.scan_pair_cap = v.integer("scan_pair_cap", pc.scan_pair_cap);
    return pc;
}

ScheduleConfig parse_schedule(const ConfigView& root) {
    ScheduleConfig sc;
    if (!root.has("schedule")) return sc;
    ConfigView v = root.sub("schedule");
    sc.entries = static_cast<int>(v.integer("entries", sc.entries));
    sc.nodes = static_cast<int>(v.integer("nodes", sc.nodes));
    sc.categories = static_cast<int>(v.integer("categories", sc.categories));
    sc.partitions = static_cast<int>(v.integer("partitions", sc.partitions));
    sc.replaces = static_cast<int>(v.integer("replaces", sc.replaces));
    sc.swaps = static_cast<int>(v.integer("swaps", sc.swaps));
    sc.hypers = static_cast<int>(v.integer("hypers", sc.hypers));
    sc.typical_refresh_sweeps = static_cast<int>(
        v.integer("typical_refresh_sweeps", sc.typical_refresh_sweeps));
    return sc;
}

ModelKind resolve_model(const ConfigView& cfg, const Dataset& x) {
    std::string wanted = cfg.str("model", "");
    const std::string& tag = x.model_tag();
    if (!wanted.empty()) {
        ModelKind kind = model_kind_from_string(wanted);
        if (!tag.empty() && tag != to_string(kind))
            throw data_error("dataset was generated for model '" + tag +
                             "' but the config says '" + wanted + "'");
        return kind;
    }
    if (!tag.empty()) return model_kind_from_string(tag);
    throw config_error(
        "model: missing from both the config and the dataset header");
}

void write_pairs_tsv(const std::string& path,
                     const std::vector<std::pair<int, int>>& pairs) {
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    for (const auto& [i, j] : pairs) f << i << '\t' << j << '\n';
    if (!f.good()) throw data_error("write failed on " + path);
}

void write_indexed_tsv(const std::string& path,
                       const std::vector<double>& values) {
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    char buf[64];
    for (std::size_t k = 0; k < values.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu\t%.17g\n", k, values[k]);
        f << buf;
    }
    if (!f.good()) throw data_error("write failed on " + path);
}

WeightedGraphState build_truth(const ConfigView& gv, double theta, Rng& rng,
                               Json* meta) {
    std::string type = gv.str("type");
    WeightedGraphState g(1);
    if (type == "er-weighted") {
        g = gen_er_weighted(static_cast<int>(gv.integer("n")),
                            gv.num("avg_degree"), gv.num("w_mean"),
                            gv.num("w_sd", 0.0), rng);
    } else if (type == "planted-blocks") {
        g = gen_planted_blocks(static_cast<int>(gv.integer("n")),
                               static_cast<int>(gv.integer("blocks")),
                               gv.num("p_in"), gv.num("p_out"),
                               gv.num("w_mean"), gv.num("w_sd", 0.0), rng);
    } else if (type == "triangle-enriched") {
        int n = static_cast<int>(gv.integer("n"));
        EnrichedGraph eg = gen_triangle_enriched(n, gv.integer("edges"),
                                                 static_cast<int>(gv.integer(
                                                     "rounds", 3)),
                                                 rng);
        double w = gv.num("weight", 1.0);
        g = WeightedGraphState(n);
        for (const auto& [i, j] : eg.edges) g.set_entry(i, j, w);
        if (meta) (*meta)["triad_exhausted"] = eg.exhausted;
    } else {
        throw config_error(gv.path() + ".type: unknown graph type '" + type +
                           "'");
    }
    for (int i = 0; i < g.size(); ++i) g.set_theta(i, theta);
    return g;
}

Dataset simulate_data(const WeightedGraphState& truth, ModelKind kind,
                      const std::string& dkind, int m, Rng& rng) {
    if (m < 1) throw config_error("data.samples must be >= 1");
    switch (kind) {
        case ModelKind::kinetic_ising: {
            if (dkind == "chain")
                return simulate_kinetic_ising(truth, m, Dataset::Kind::chain,
                                              rng);
            if (dkind == "parallel")
                return simulate_kinetic_ising(truth, m,
                                              Dataset::Kind::parallel, rng);
            throw config_error(
                "data.kind: kinetic-ising data is 'chain' or 'parallel'");
        }
        case ModelKind::gaussian:
            if (dkind != "iid")
                throw config_error(
                    "data.kind: gaussian samples are independent ('iid')");
            return simulate_gaussian(truth, m, rng);
        default:
            throw config_error("no simulator for model '" + to_string(kind) +
                               "'");
    }
}

const char* move_name(MoveKind k) {
    switch (k) {
        case MoveKind::entry: return "entry";
        case MoveKind::node: return "node";
        case MoveKind::category: return "category";
        case MoveKind::partition: return "partition";
        case MoveKind::replace: return "replace";
        case MoveKind::swap: return "swap";
        case MoveKind::hyper: return "hyper";
        default: return "?";
    }
}

}  // namespace

void cmd_generate(const CliOptions& opt) {
    auto t0 = Clock::now();
    ConfigView cfg(load_json_file(opt.config_path));
    auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));
    std::string prefix = cfg.str("out_prefix");
    ensure_parent_dir(prefix);

    ConfigView dv = cfg.sub("data");
    ModelKind kind = model_kind_from_string(dv.str("model"));
    auto m = static_cast<int>(dv.integer("samples"));
    std::string dkind = dv.str(
        "kind", kind == ModelKind::gaussian ? "iid" : "chain");
    double theta =
        cfg.num("theta", kind == ModelKind::gaussian ? 1.0 : 0.0);
    if (kind == ModelKind::gaussian && !(theta > 0))
        throw config_error("theta: gaussian truth needs theta > 0");

    RunManifest man("generate", cfg.raw(), seed);
    Json meta = Json::object();
    Rng graph_rng(seed, 0), data_rng(seed, 1);
    WeightedGraphState truth = build_truth(cfg.sub("graph"), theta, graph_rng,
                                           &meta);
    Dataset data = simulate_data(truth, kind, dkind, m, data_rng);
    data.set_model_tag(to_string(kind));
    man.add_timing("simulate", seconds_since(t0));

    std::string truth_path = prefix + ".truth.tsv";
    std::string theta_path = prefix + ".truth-theta.tsv";
    std::string data_path = prefix + ".data.csv";
    write_edge_list(truth_path, truth);
    write_node_params(theta_path, truth);
    data.write_csv(data_path);

    meta["n"] = truth.size();
    meta["edges"] = truth.num_edges();
    man.set_field("graph_meta", meta);
    man.add_output(truth_path);
    man.add_output(theta_path);
    man.add_output(data_path);
    man.add_timing("total", seconds_since(t0));
    man.write(prefix + ".manifest.json");
}

void cmd_reconstruct(const CliOptions& opt) {
    auto t0 = Clock::now();
    ConfigView cfg(load_json_file(opt.config_path));
    auto seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
    std::string prefix = cfg.str("out_prefix");
    ensure_parent_dir(prefix);
    std::string data_path = cfg.str("data");

    RunManifest man("reconstruct", cfg.raw(), seed);
    Dataset x = Dataset::read_csv(data_path);
    man.add_input(data_path);
    ModelKind kind = resolve_model(cfg, x);
    x.validate_for(kind);

    PriorParams pp = parse_prior(cfg);
    ProposalConfig pc = parse_proposals(cfg);
    ConfigView gd = cfg.sub_or_empty("greedy");
    auto max_iters = static_cast<int>(gd.integer("max_iters", 50));
    double tol = gd.num("tol_per_node", 1e-4);

    ChainState cs(x, kind, pp, WeightedGraphState(x.n_nodes()));
    std::vector<double> trace;
    int passes = greedy_map(cs, pc, max_iters, tol, &trace);
    man.add_timing("greedy", seconds_since(t0));

    std::string map_path = prefix + ".map.tsv";
    std::string theta_path = prefix + ".map-theta.tsv";
    std::string typ_path = prefix + ".typical.tsv";
    std::string trace_path = prefix + ".trace.tsv";
    write_edge_list(map_path, cs.graph());
    write_node_params(theta_path, cs.graph());
    Rng scan_rng(seed, 1);
    write_pairs_tsv(typ_path, greedy_candidate_pairs(cs, pc, scan_rng));
    write_indexed_tsv(trace_path, trace);

    man.set_field("passes", passes);
    man.set_field("log_joint", cs.log_joint());
    man.set_field("map_edges", cs.graph().num_edges());
    man.add_output(map_path);
    man.add_output(theta_path);
    man.add_output(typ_path);
    man.add_output(trace_path);
    man.add_timing("total", seconds_since(t0));
    man.write(prefix + ".manifest.json");
}

namespace {

struct ChainRun {
    std::unique_ptr<PosteriorAccumulator> acc;
    std::vector<double> trace;
    Json snapshots = Json::array();
    std::vector<std::pair<std::string, WeightedGraphState>> snaps;
    MoveStats stats[static_cast<int>(MoveKind::count_)];
};

}  // namespace

void cmd_sample(const CliOptions& opt) {
    auto t0 = Clock::now();
    ConfigView cfg(load_json_file(opt.config_path));
    auto seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
    std::string prefix = cfg.str("out_prefix");
    ensure_parent_dir(prefix);
    std::string data_path = cfg.str("data");

    RunManifest man("sample", cfg.raw(), seed);
    Dataset x = Dataset::read_csv(data_path);
    man.add_input(data_path);
    ModelKind kind = resolve_model(cfg, x);
    x.validate_for(kind);
    int n = x.n_nodes();

    PriorParams pp = parse_prior(cfg);
    ProposalConfig pc = parse_proposals(cfg);
    ScheduleConfig sc = parse_schedule(cfg);

    ConfigView sw = cfg.sub("sweeps");
    auto total = sw.integer("total");
    auto burn = sw.integer("burn_in", 0);
    auto thin = sw.integer("thin", 1);
    if (total < 1) throw config_error("sweeps.total must be >= 1");
    if (burn < 0) throw config_error("sweeps.burn_in must be >= 0");
    if (burn >= total)
        throw config_error("sweeps.burn_in must be smaller than sweeps.total");
    if (thin < 1) throw config_error("sweeps.thin must be >= 1");
    auto chains = static_cast<int>(cfg.integer("chains", 1));
    if (chains < 1) throw config_error("chains must be >= 1");
    bool conditional = cfg.flag("conditional_mean", false);
    bool histograms = cfg.flag("histograms", false);
    bool snapshots = cfg.flag("snapshots", false);

    WeightedGraphState init(n);
    if (cfg.has("init")) {
        read_edge_list(cfg.str("init"), init);
        man.add_input(cfg.str("init"));
    }
    if (cfg.has("init_theta")) {
        read_node_params(cfg.str("init_theta"), init);
        man.add_input(cfg.str("init_theta"));
    }
    std::unique_ptr<WeightedGraphState> ref;
    if (cfg.has("reference")) {
        ref = std::make_unique<WeightedGraphState>(n);
        read_edge_list(cfg.str("reference"), *ref);
        man.add_input(cfg.str("reference"));
    }

    std::vector<ChainRun> runs(chains);
    std::vector<std::exception_ptr> errors(chains);
    auto run_chain = [&](int c) {
        try {
            ChainRun& out = runs[c];
            out.acc = std::make_unique<PosteriorAccumulator>(
                n, histograms ? pp.delta : 0.0);
            ChainState cs(x, kind, pp, init);
            Sampler smp(cs, pc, sc, Rng(seed, static_cast<std::uint64_t>(c)));
            for (std::int64_t s = 0; s < burn; ++s) smp.sweep();
            std::int64_t kept = 0;
            for (std::int64_t s = 0; s < total - burn; ++s) {
                smp.sweep();
                out.trace.push_back(ref ? jaccard_similarity(cs.graph(), *ref)
                                        : cs.log_joint());
                if ((s + 1) % thin != 0) continue;
                out.acc->add(cs.graph());
                if (!snapshots) continue;
                std::string path = prefix + ".chain" + std::to_string(c) +
                                   ".sample" + std::to_string(kept) + ".tsv";
                out.snaps.emplace_back(path, cs.graph());
                Json rec;
                rec["file"] = path;
                rec["sweep"] = burn + s + 1;
                rec["log_joint"] = cs.log_joint();
                Json cats = Json::array();
                for (const auto& cat : cs.wcats().categories())
                    cats.push_back({cat.g, cat.m});
                rec["categories"] = cats;
                rec["labels"] = cs.sbm().labels();
                out.snapshots.push_back(rec);
                ++kept;
            }
            for (int k = 0; k < static_cast<int>(MoveKind::count_); ++k)
                out.stats[k] = smp.stats(static_cast<MoveKind>(k));
        } catch (...) {
            errors[c] = std::current_exception();
        }
    };

    int workers = std::max(1, opt.threads);
    for (int start = 0; start < chains; start += workers) {
        int stop = std::min(chains, start + workers);
        std::vector<std::thread> pool;
        for (int c = start; c < stop; ++c) pool.emplace_back(run_chain, c);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    man.add_timing("sampling", seconds_since(t0));

    PosteriorAccumulator merged(n, histograms ? pp.delta : 0.0);
    for (const auto& r : runs) merged.merge(*r.acc);

    std::string marg_path = prefix + ".marginals.tsv";
    std::string mp_path = prefix + ".mp.tsv";
    std::string mp_theta_path = prefix + ".mp-theta.tsv";
    std::string diag_path = prefix + ".diagnostics.json";
    write_marginals_tsv(marg_path, merged, conditional);
    WeightedGraphState mp = mp_estimate(merged, conditional);
    write_edge_list(mp_path, mp);
    write_node_params(mp_theta_path, mp);

    Json diag;
    diag["trace_kind"] = ref ? "similarity" : "log_joint";
    double tau_max = 1.0;
    Json per_chain = Json::array();
    for (int c = 0; c < chains; ++c) {
        double tau = integrated_autocorr_time(runs[c].trace);
        tau_max = std::max(tau_max, tau);
        Json jc;
        jc["tau_int"] = tau;
        Json acc_rates;
        for (int k = 0; k < static_cast<int>(MoveKind::count_); ++k) {
            const MoveStats& st = runs[c].stats[k];
            acc_rates[move_name(static_cast<MoveKind>(k))] = {st.proposed,
                                                              st.accepted};
        }
        jc["moves"] = acc_rates;
        jc["similarity_trace"] = runs[c].trace;
        per_chain.push_back(jc);
    }
    diag["chains"] = per_chain;
    diag["tau_int"] = tau_max;
    if (!runs.empty() && runs[0].trace.size() > 1) {
        int max_lag = static_cast<int>(
            std::min<std::size_t>(200, runs[0].trace.size() - 1));
        diag["acf"] = autocorrelation(runs[0].trace, max_lag).rho;
    }
    {
        std::ofstream f(diag_path);
        if (!f) throw data_error("cannot write " + diag_path);
        f << diag.dump(2) << "\n";
    }

    man.add_output(marg_path);
    man.add_output(mp_path);
    man.add_output(mp_theta_path);
    man.add_output(diag_path);
    if (snapshots) {
        Json all = Json::array();
        for (int c = 0; c < chains; ++c) {
            for (const auto& [path, g] : runs[c].snaps) {
                write_edge_list(path, g);
                man.add_output(path);
            }
            all.push_back(runs[c].snapshots);
        }
        std::string snap_path = prefix + ".samples.json";
        std::ofstream f(snap_path);
        if (!f) throw data_error("cannot write " + snap_path);
        f << all.dump(2) << "\n";
        f.close();
        man.add_output(snap_path);
    }
    man.set_field("samples_retained", merged.n_samples());
    man.add_timing("total", seconds_since(t0));
    man.write(prefix + ".manifest.json");
}

void cmd_compare(const CliOptions& opt) {
    auto t0 = Clock::now();
    ConfigView cfg(load_json_file(opt.config_path));
    std::string prefix = cfg.str("out_prefix");
    ensure_parent_dir(prefix);
    std::string data_path = cfg.str("data");
    std::string marg_path = cfg.str("marginals");

    RunManifest man("compare", cfg.raw(),
                    static_cast<std::uint64_t>(cfg.integer("seed", 0)));
    Dataset x = Dataset::read_csv(data_path);
    man.add_input(data_path);
    auto rows = read_marginals_tsv(marg_path);
    man.add_input(marg_path);
    int n = x.n_nodes();
    for (const auto& r : rows)
        if (r.i < 0 || r.j >= n || r.i >= r.j)
            throw data_error(marg_path + ": pair outside the dataset's range");

    auto bins = static_cast<int>(cfg.integer("bins", 16));
    BaselineTable bt = pairwise_baselines(x, bins);
    man.add_timing("baselines", seconds_since(t0));

    // marginal lookups over the full pair universe
    std::vector<double> pi(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> wm(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<std::pair<int, int>> reference;
    for (const auto& r : rows) {
        pi[static_cast<std::size_t>(r.i) * n + r.j] = r.pi;
        wm[static_cast<std::size_t>(r.i) * n + r.j] = r.w_mean;
        if (r.pi > 0.5) reference.emplace_back(r.i, r.j);
    }

    char buf[256];
    std::string base_path = prefix + ".baselines.tsv";
    std::string scatter_path = prefix + ".scatter.tsv";
    {
        std::ofstream fb(base_path), fs(scatter_path);
        if (!fb || !fs) throw data_error("cannot write comparison tables");
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double pe = bt.pearson_defined(i, j)
                                ? bt.pearson(i, j)
                                : std::numeric_limits<double>::quiet_NaN();
                std::snprintf(buf, sizeof buf,
                              "%d\t%d\t%.17g\t%.17g\t%.17g\n", i, j,
                              bt.cov(i, j), pe, bt.mi(i, j));
                fb << buf;
                std::snprintf(
                    buf, sizeof buf,
                    "%d\t%d\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\n", i, j,
                    pi[static_cast<std::size_t>(i) * n + j],
                    wm[static_cast<std::size_t>(i) * n + j], bt.cov(i, j), pe,
                    bt.mi(i, j));
                fs << buf;
            }
        if (!fb.good() || !fs.good())
            throw data_error("write failed on comparison tables");
    }

    std::string curve_path = prefix + ".curves.tsv";
    {
        std::ofstream f(curve_path);
        if (!f) throw data_error("cannot write " + curve_path);
        auto emit = [&](const char* name, auto&& score_of) {
            std::vector<std::tuple<int, int, double>> scores;
            scores.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    scores.emplace_back(i, j, score_of(i, j));
            RankedComparison rc =
                threshold_reconstruction_compare(std::move(scores), reference);
            for (std::size_t k = 0; k < rc.fraction.size(); ++k) {
                std::snprintf(buf, sizeof buf, "%s\t%.17g\t%.17g\t%.17g\n",
                              name, rc.fraction[k], rc.jaccard[k], rc.tpr[k]);
                f << buf;
            }
        };
        emit("cov", [&](int i, int j) { return bt.cov(i, j); });
        emit("pearson", [&](int i, int j) {
            return bt.pearson_defined(i, j)
                       ? bt.pearson(i, j)
                       : std::numeric_limits<double>::quiet_NaN();
        });
        emit("mi", [&](int i, int j) { return bt.mi(i, j); });
        if (!f.good()) throw data_error("write failed on " + curve_path);
    }

    std::string ineq_path = prefix + ".inequality.json";
    if (cfg.flag("inequality_check", true)) {
        Json rep;
        rep["pearson_violations"] = pearson_bound_violations(bt);
        rep["mi_violations"] = mi_bound_violations(bt);
        std::ofstream f(ineq_path);
        if (!f) throw data_error("cannot write " + ineq_path);
        f << rep.dump(2) << "\n";
        f.close();
        man.add_output(ineq_path);
    }

    man.add_output(base_path);
    man.add_output(scatter_path);
    man.add_output(curve_path);
    man.add_timing("total", seconds_since(t0));
    man.write(prefix + ".manifest.json");
}

void cmd_bench_scaling(const CliOptions& opt) {
    auto t0 = Clock::now();
    ConfigView cfg(load_json_file(opt.config_path));
    auto seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
    std::string prefix = cfg.str("out_prefix");
    ensure_parent_dir(prefix);

    auto sizes = cfg.int_list("sizes", {100, 200, 400, 800});
    double edges_per_node = cfg.num("edges_per_node", 2.5);
    auto rounds = static_cast<int>(cfg.integer("rounds", 3));
    double p = cfg.num("p", 0.9);
    double eps = cfg.num("eps", 1e-8);
    auto warm = static_cast<int>(cfg.integer("warm_sweeps", 200));
    auto measure = static_cast<int>(cfg.integer("measure_sweeps", 3000));

    std::vector<std::pair<std::string, SelectorConfig>> mixes;
    if (cfg.has("mixes")) {
        const Json& arr = cfg.raw().at("mixes");
        if (!arr.is_array()) throw config_error("mixes: expected an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            ConfigView mv(arr[k], "mixes[" + std::to_string(k) + "]");
            SelectorConfig sel;
            sel.w_typical = 0;
            sel.w_uniform = 1;
            sel.w_near = 0;
            mixes.emplace_back(mv.str("name"), parse_selector(mv, sel));
        }
    } else {
        SelectorConfig uniform;
        uniform.w_typical = 0;
        uniform.w_uniform = 1;
        uniform.w_near = 0;
        SelectorConfig nearby;
        nearby.w_typical = 0;
        nearby.w_uniform = 0.1;
        nearby.w_near = 0.5;
        mixes.emplace_back("uniform", uniform);
        mixes.emplace_back("nearby", nearby);
    }

    RunManifest man("bench-scaling", cfg.raw(), seed);
    std::string out_path = prefix + ".scaling.tsv";
    std::ofstream f(out_path);
    if (!f) throw data_error("cannot write " + out_path);
    char buf[160];
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        int n = static_cast<int>(sizes[si]);
        auto e = static_cast<std::int64_t>(std::llround(edges_per_node * n));
        Rng graph_rng(seed, si);
        EnrichedGraph g = gen_triangle_enriched(n, e, rounds, graph_rng);
        FactorizedTarget target(n, g.edges, p, eps);
        for (std::size_t mi = 0; mi < mixes.size(); ++mi) {
            FactorizedBenchResult r = run_factorized_bench(
                target, mixes[mi].second, warm, measure,
                Rng(seed, 1000 + si * 100 + mi));
            double tau = integrated_autocorr_time(r.trace);
            std::snprintf(buf, sizeof buf, "%d\t%s\t%.17g\t%.17g\n", n,
                          mixes[mi].first.c_str(), tau, r.accept_rate);
            f << buf;
            f.flush();
        }
    }
    if (!f.good()) throw data_error("write failed on " + out_path);
    f.close();

    man.add_output(out_path);
    man.add_timing("total", seconds_since(t0));
    man.write(prefix + ".manifest.json");
}

int run_cli(int argc, char** argv) {
    CLI::App app{
        "reconstructs weighted networks from observed node behavior by "
        "sampling the Bayesian posterior over sparse graphs"};
    app.require_subcommand(1);

    CliOptions opt;
    struct Sub {
        const char* name;
        const char* desc;
        void (*fn)(const CliOptions&);
    };
    const Sub subs[] = {
        {"generate", "draw a synthetic truth graph and observed data",
         cmd_generate},
        {"reconstruct", "greedy search for the single best graph",
         cmd_reconstruct},
        {"sample", "run posterior sampling chains and write marginals",
         cmd_sample},
        {"compare", "correlation baselines and ranking curves vs marginals",
         cmd_compare},
        {"bench-scaling", "mixing-time scaling of proposal mixtures",
         cmd_bench_scaling},
    };
    void (*selected)(const CliOptions&) = nullptr;
    for (const Sub& s : subs) {
        CLI::App* sc = app.add_subcommand(s.name, s.desc);
        sc->add_option("-c,--config", opt.config_path, "JSON config file")
            ->required();
        sc->add_option("-t,--threads", opt.threads,
                       "parallel chains to run at once");
        sc->callback([&selected, &s] { selected = s.fn; });
    }

    try {
        app.parse(argc, argv);
        if (selected) selected(opt);
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace netrecon
