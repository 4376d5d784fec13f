#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "netrecon/dataset.hpp"
#include "netrecon/estimators.hpp"
#include "netrecon/graph_state.hpp"

using namespace netrecon;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// each case works in its own directory under /tmp so reruns start clean
fs::path work_dir(const char* name) {
    fs::path dir = fs::path("/tmp/netrecon_cli_test") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_tool(const std::string& args) {
    std::string cmd =
        std::string(NETRECON_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    REQUIRE(st != -1);
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string write_config(const fs::path& dir, const char* name,
                         const json& cfg) {
    fs::path p = dir / name;
    std::ofstream f(p);
    f << cfg.dump(2) << "\n";
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json load_json(const std::string& path) {
    return json::parse(slurp(path));
}

// a small observed dataset most cases reconstruct from
std::string make_dataset(const fs::path& dir, int samples = 200) {
    json cfg = {
        {"seed", 5},
        {"out_prefix", (dir / "gen").string()},
        {"data",
         {{"model", "kinetic-ising"}, {"samples", samples}, {"kind", "chain"}}},
        {"graph",
         {{"type", "er-weighted"},
          {"n", 6},
          {"avg_degree", 1.0},
          {"w_mean", 1.5},
          {"w_sd", 0.1}}},
    };
    REQUIRE(run_tool("generate -c " + write_config(dir, "gen.json", cfg)) == 0);
    return (dir / "gen.data.csv").string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generate writes data, truth, and a manifest") {
    auto dir = work_dir("generate");
    json cfg = {
        {"seed", 11},
        {"out_prefix", (dir / "a").string()},
        {"data",
         {{"model", "kinetic-ising"}, {"samples", 30}, {"kind", "chain"}}},
        {"graph",
         {{"type", "er-weighted"},
          {"n", 8},
          {"avg_degree", 2.0},
          {"w_mean", 0.5},
          {"w_sd", 0.1}}},
    };
    CHECK(run_tool("generate -c " + write_config(dir, "a.json", cfg)) == 0);

    auto data = Dataset::read_csv((dir / "a.data.csv").string());
    CHECK(data.n_nodes() == 8);
    CHECK(data.kind() == Dataset::Kind::chain);
    CHECK(data.n_cols() == 31);
    CHECK(data.model_tag() == "kinetic-ising");

    WeightedGraphState truth(8);
    read_edge_list((dir / "a.truth.tsv").string(), truth);
    read_node_params((dir / "a.truth-theta.tsv").string(), truth);
    CHECK(truth.num_edges() == 8);  // round(8 * 2 / 2)

    auto man = load_json((dir / "a.manifest.json").string());
    CHECK(man["command"] == "generate");
    CHECK(man["seed"] == 11);
    CHECK(man["graph_meta"]["edges"] == 8);
    for (auto& [path, hash] : man["outputs"].items()) {
        CHECK(fs::exists(path));
        CHECK(hash.get<std::string>().size() == 16);
    }

    // the same seed reproduces the files byte for byte
    cfg["out_prefix"] = (dir / "b").string();
    CHECK(run_tool("generate -c " + write_config(dir, "b.json", cfg)) == 0);
    CHECK(slurp((dir / "a.data.csv").string()) ==
          slurp((dir / "b.data.csv").string()));
    CHECK(slurp((dir / "a.truth.tsv").string()) ==
          slurp((dir / "b.truth.tsv").string()));
}

TEST_CASE("generate rejects an impossible degree with the config code") {
    auto dir = work_dir("gen_bad");
    json cfg = {
        {"seed", 1},
        {"out_prefix", (dir / "x").string()},
        {"data",
         {{"model", "kinetic-ising"}, {"samples", 10}, {"kind", "chain"}}},
        {"graph",
         {{"type", "er-weighted"},
          {"n", 8},
          {"avg_degree", 9.0},
          {"w_mean", 0.5}}},
    };
    CHECK(run_tool("generate -c " + write_config(dir, "x.json", cfg)) == 2);

    cfg["graph"]["avg_degree"] = 2.0;
    cfg["graph"]["type"] = "banana";
    CHECK(run_tool("generate -c " + write_config(dir, "y.json", cfg)) == 2);
}

TEST_CASE("an unstable gaussian truth fails with the numeric code") {
    auto dir = work_dir("gen_gauss");
    // unit-variance nodes with weight-5 couplings cannot be a covariance
    json cfg = {
        {"seed", 1},
        {"out_prefix", (dir / "g").string()},
        {"theta", 1.0},
        {"data", {{"model", "gaussian"}, {"samples", 10}, {"kind", "iid"}}},
        {"graph",
         {{"type", "er-weighted"},
          {"n", 4},
          {"avg_degree", 2.0},
          {"w_mean", 5.0}}},
    };
    CHECK(run_tool("generate -c " + write_config(dir, "g.json", cfg)) == 4);
}

TEST_CASE("reconstruct writes the greedy graph and its search trace") {
    auto dir = work_dir("reconstruct");
    auto data = make_dataset(dir);
    json cfg = {
        {"seed", 1},
        {"out_prefix", (dir / "rec").string()},
        {"data", data},
        {"params", {{"delta", 0.25}, {"lambda", 1.0}}},
        {"greedy", {{"max_iters", 20}}},
    };
    CHECK(run_tool("reconstruct -c " + write_config(dir, "rec.json", cfg)) == 0);

    WeightedGraphState map(6);
    read_edge_list((dir / "rec.map.tsv").string(), map);
    CHECK(map.num_edges() >= 1);

    // trace rows are "index<TAB>objective", nondecreasing down the file
    std::ifstream tf(dir / "rec.trace.tsv");
    int idx;
    double val, prev = -1e300;
    int rows = 0;
    while (tf >> idx >> val) {
        CHECK(idx == rows);
        CHECK(val >= prev - 1e-9);
        prev = val;
        ++rows;
    }
    CHECK(rows >= 1);

    auto man = load_json((dir / "rec.manifest.json").string());
    CHECK(man["command"] == "reconstruct");
    CHECK(man["passes"].get<int>() == rows);
    CHECK(man["map_edges"].get<int>() == map.num_edges());
    CHECK(man["inputs"].contains(data));
    CHECK(fs::exists(dir / "rec.typical.tsv"));
    CHECK(fs::exists(dir / "rec.map-theta.tsv"));
}

TEST_CASE("a missing dataset file fails with the data code") {
    auto dir = work_dir("missing_data");
    json cfg = {
        {"seed", 1},
        {"out_prefix", (dir / "r").string()},
        {"data", (dir / "nope.csv").string()},
        {"params", {{"delta", 0.25}}},
    };
    CHECK(run_tool("reconstruct -c " + write_config(dir, "r.json", cfg)) == 3);
}

TEST_CASE("sampling writes marginals, estimates, and diagnostics") {
    auto dir = work_dir("sample");
    auto data = make_dataset(dir);
    json cfg = {
        {"seed", 3},
        {"out_prefix", (dir / "s").string()},
        {"data", data},
        {"chains", 2},
        {"histograms", true},
        {"params", {{"delta", 0.25}, {"lambda", 1.0}}},
        {"sweeps", {{"total", 40}, {"burn_in", 10}, {"thin", 2}}},
    };
    CHECK(run_tool("sample -c " + write_config(dir, "s.json", cfg)) == 0);

    auto rows = read_marginals_tsv((dir / "s.marginals.tsv").string());
    CHECK(!rows.empty());
    for (auto& r : rows) {
        CHECK(r.pi > 0.0);
        CHECK(r.pi <= 1.0);
        CHECK(r.i < r.j);
    }

    WeightedGraphState mp(6);
    read_edge_list((dir / "s.mp.tsv").string(), mp);
    read_node_params((dir / "s.mp-theta.tsv").string(), mp);

    auto diag = load_json((dir / "s.diagnostics.json").string());
    CHECK(diag["trace_kind"] == "log_joint");
    CHECK(diag["tau_int"].get<double>() >= 1.0);
    REQUIRE(diag["chains"].size() == 2);
    auto entry = diag["chains"][0]["moves"]["entry"];
    CHECK(entry[0].get<long long>() > 0);                      // proposed
    CHECK(entry[1].get<long long>() <= entry[0].get<long long>());
    CHECK(diag["chains"][0]["similarity_trace"].size() == 30);

    auto man = load_json((dir / "s.manifest.json").string());
    CHECK(man["command"] == "sample");
    // two chains of 30 kept sweeps, thinned by 2
    CHECK(man["samples_retained"].get<int>() == 30);

    // reruns with the same seed are byte-identical
    cfg["out_prefix"] = (dir / "s2").string();
    CHECK(run_tool("sample -c " + write_config(dir, "s2.json", cfg)) == 0);
    CHECK(slurp((dir / "s.marginals.tsv").string()) ==
          slurp((dir / "s2.marginals.tsv").string()));

    // with a reference graph the trace turns into a similarity series
    cfg["out_prefix"] = (dir / "s3").string();
    cfg["reference"] = (dir / "gen.truth.tsv").string();
    CHECK(run_tool("sample -c " + write_config(dir, "s3.json", cfg)) == 0);
    auto diag3 = load_json((dir / "s3.diagnostics.json").string());
    CHECK(diag3["trace_kind"] == "similarity");
    for (auto& v : diag3["chains"][0]["similarity_trace"]) {
        CHECK(v.get<double>() >= 0.0);
        CHECK(v.get<double>() <= 1.0);
    }
}

TEST_CASE("snapshot mode records every retained sample") {
    auto dir = work_dir("snapshots");
    auto data = make_dataset(dir, 60);
    json cfg = {
        {"seed", 4},
        {"out_prefix", (dir / "s").string()},
        {"data", data},
        {"snapshots", true},
        {"params", {{"delta", 0.25}}},
        {"sweeps", {{"total", 12}, {"burn_in", 4}, {"thin", 4}}},
    };
    CHECK(run_tool("sample -c " + write_config(dir, "s.json", cfg)) == 0);
    auto all = load_json((dir / "s.samples.json").string());
    REQUIRE(all.size() == 1);  // one chain
    REQUIRE(all[0].size() == 2);  // 8 kept sweeps, every 4th
    for (auto& rec : all[0]) {
        CHECK(fs::exists(rec["file"].get<std::string>()));
        CHECK(rec["sweep"].get<int>() > 4);
        CHECK(rec.contains("categories"));
        CHECK(rec["labels"].size() == 6);
    }
}

TEST_CASE("sampling validates its sweep budget and model tag") {
    auto dir = work_dir("sample_bad");
    auto data = make_dataset(dir, 30);
    json cfg = {
        {"seed", 1},
        {"out_prefix", (dir / "s").string()},
        {"data", data},
        {"params", {{"delta", 0.25}}},
        {"sweeps", {{"total", 10}, {"burn_in", 10}}},
    };
    CHECK(run_tool("sample -c " + write_config(dir, "b1.json", cfg)) == 2);

    cfg["sweeps"] = {{"total", 10}, {"burn_in", 2}, {"thin", 0}};
    CHECK(run_tool("sample -c " + write_config(dir, "b2.json", cfg)) == 2);

    cfg["sweeps"] = {{"total", 10}};
    cfg["chains"] = 0;
    CHECK(run_tool("sample -c " + write_config(dir, "b3.json", cfg)) == 2);

    // the dataset header says kinetic-ising; asking for gaussian is a
    // data mismatch, not a config typo
    cfg["chains"] = 1;
    cfg["model"] = "gaussian";
    CHECK(run_tool("sample -c " + write_config(dir, "b4.json", cfg)) == 3);
}

TEST_CASE("compare writes baselines, curves, and a clean inequality report") {
    auto dir = work_dir("compare");
    auto data = make_dataset(dir);
    json scfg = {
        {"seed", 3},
        {"out_prefix", (dir / "s").string()},
        {"data", data},
        {"params", {{"delta", 0.25}}},
        {"sweeps", {{"total", 30}, {"burn_in", 10}}},
    };
    REQUIRE(run_tool("sample -c " + write_config(dir, "s.json", scfg)) == 0);

    json cfg = {
        {"out_prefix", (dir / "cmp").string()},
        {"data", data},
        {"marginals", (dir / "s.marginals.tsv").string()},
        {"bins", 8},
    };
    CHECK(run_tool("compare -c " + write_config(dir, "cmp.json", cfg)) == 0);

    // one row per pair in the baseline and scatter tables, three ranking
    // curves over the same pairs
    auto count_lines = [&](const fs::path& p) {
        std::ifstream f(p);
        std::string line;
        int c = 0;
        while (std::getline(f, line))
            if (!line.empty()) ++c;
        return c;
    };
    CHECK(count_lines(dir / "cmp.baselines.tsv") == 15);
    CHECK(count_lines(dir / "cmp.scatter.tsv") == 15);
    CHECK(count_lines(dir / "cmp.curves.tsv") == 45);

    auto ineq = load_json((dir / "cmp.inequality.json").string());
    CHECK(ineq["pearson_violations"].get<long long>() == 0);
    CHECK(ineq["mi_violations"].get<long long>() == 0);

    // marginal rows outside the dataset's node range are data errors
    std::ofstream bad(dir / "bad.tsv");
    bad << "0\t99\t0.5\t1.0\t0.1\n";
    bad.close();
    cfg["marginals"] = (dir / "bad.tsv").string();
    CHECK(run_tool("compare -c " + write_config(dir, "cmp2.json", cfg)) == 3);
}

TEST_CASE("the scaling bench writes one row per size and mix") {
    auto dir = work_dir("bench");
    json cfg = {
        {"seed", 2},
        {"out_prefix", (dir / "b").string()},
        {"sizes", {30, 50}},
        {"edges_per_node", 1.5},
        {"rounds", 1},
        {"p", 0.9},
        {"eps", 1e-6},
        {"warm_sweeps", 5},
        {"measure_sweeps", 40},
    };
    CHECK(run_tool("bench-scaling -c " + write_config(dir, "b.json", cfg)) == 0);

    std::ifstream f(dir / "b.scaling.tsv");
    int n, rows = 0;
    std::string name;
    double tau, acc;
    bool saw_uniform = false, saw_nearby = false;
    while (f >> n >> name >> tau >> acc) {
        CHECK((n == 30 || n == 50));
        saw_uniform = saw_uniform || name == "uniform";
        saw_nearby = saw_nearby || name == "nearby";
        CHECK(std::isfinite(tau));
        CHECK(acc >= 0.0);
        CHECK(acc <= 1.0);
        ++rows;
    }
    CHECK(rows == 4);
    CHECK(saw_uniform);
    CHECK(saw_nearby);
}

TEST_CASE("usage and config mistakes exit with the config code") {
    auto dir = work_dir("usage");
    CHECK(run_tool("") == 2);
    CHECK(run_tool("frobnicate -c x.json") == 2);
    CHECK(run_tool("generate") == 2);  // --config is required

    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(run_tool("generate -c " + (dir / "broken.json").string()) == 2);

    // syntactically fine but missing a required key
    json cfg = {{"seed", 1}};
    CHECK(run_tool("generate -c " + write_config(dir, "empty.json", cfg)) == 2);
}

}  // TEST_SUITE
