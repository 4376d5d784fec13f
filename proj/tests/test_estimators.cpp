#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "netrecon/errors.hpp"
#include "netrecon/estimators.hpp"
#include "netrecon/graph_state.hpp"
#include "netrecon/rng.hpp"

using namespace netrecon;

namespace {

std::string temp_path(const char* name) {
    return std::string("/tmp/netrecon_estimators_test_") + name;
}

bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

std::vector<WeightedGraphState> random_sample_set(int n, int count, Rng& rng) {
    std::vector<WeightedGraphState> out;
    for (int s = 0; s < count; ++s) {
        WeightedGraphState g(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.coin(0.4)) g.set_entry(i, j, 0.25 * (1 + rng.below(8)));
        for (int i = 0; i < n; ++i) g.set_theta(i, 0.5 * rng.normal());
        out.push_back(g);
    }
    return out;
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("accumulator matches a direct pass over the stored samples") {
    const int n = 6;
    Rng rng(21, 0);
    auto samples = random_sample_set(n, 80, rng);
    PosteriorAccumulator acc(n);
    for (auto& g : samples) acc.add(g);
    CHECK(acc.n_samples() == 80);

    for (int i = 0; i < n; ++i) {
        double tsum = 0;
        for (auto& g : samples) tsum += g.theta(i);
        CHECK(close(acc.theta_mean(i), tsum / 80, 1e-12));
        for (int j = i + 1; j < n; ++j) {
            std::int64_t present = 0;
            double ws = 0, wsq = 0;
            for (auto& g : samples) {
                double w = g.weight(i, j);
                if (w != 0.0) {
                    ++present;
                    ws += w;
                    wsq += w * w;
                }
            }
            CHECK(close(acc.pi(i, j), present / 80.0, 1e-12));
            CHECK(close(acc.w_mean(i, j), ws / 80.0, 1e-12));
            if (present > 0) {
                double cm = ws / present;
                CHECK(close(acc.w_mean(i, j, true), cm, 1e-12));
                CHECK(close(acc.w_var(i, j, true), wsq / present - cm * cm,
                            1e-9));
            } else {
                CHECK(acc.stats(i, j) == nullptr);
            }
            double fm = ws / 80.0;
            CHECK(close(acc.w_var(i, j), wsq / 80.0 - fm * fm, 1e-9));
        }
    }

    // the present-pair listing is every pair seen at least once, ascending
    auto pp = acc.present_pairs();
    for (std::size_t k = 1; k < pp.size(); ++k) CHECK(pp[k - 1] < pp[k]);
    for (auto [i, j] : pp) CHECK(acc.pi(i, j) > 0.0);

    CHECK_THROWS_AS(acc.add(WeightedGraphState(n + 1)), data_error);
    CHECK_THROWS_AS(acc.pi(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(acc.theta_mean(n), std::invalid_argument);
}

TEST_CASE("merged accumulators equal one accumulator over everything") {
    const int n = 5;
    Rng rng(22, 0);
    auto samples = random_sample_set(n, 90, rng);

    PosteriorAccumulator whole(n, 0.25);
    for (auto& g : samples) whole.add(g);

    PosteriorAccumulator a(n, 0.25), b(n, 0.25), c(n, 0.25);
    for (int s = 0; s < 30; ++s) a.add(samples[s]);
    for (int s = 30; s < 55; ++s) b.add(samples[s]);
    for (int s = 55; s < 90; ++s) c.add(samples[s]);

    PosteriorAccumulator left = a;
    left.merge(b);
    left.merge(c);
    PosteriorAccumulator right = c;
    right.merge(a);
    right.merge(b);

    CHECK(left.n_samples() == 90);
    CHECK(right.n_samples() == 90);
    for (int i = 0; i < n; ++i) {
        CHECK(close(left.theta_mean(i), whole.theta_mean(i), 1e-12));
        CHECK(close(right.theta_mean(i), whole.theta_mean(i), 1e-12));
        for (int j = i + 1; j < n; ++j) {
            const auto* w = whole.stats(i, j);
            const auto* l = left.stats(i, j);
            const auto* r = right.stats(i, j);
            if (!w) {
                CHECK(l == nullptr);
                CHECK(r == nullptr);
                continue;
            }
            REQUIRE(l != nullptr);
            REQUIRE(r != nullptr);
            CHECK(l->presence == w->presence);
            CHECK(r->presence == w->presence);
            CHECK(close(l->w_sum, w->w_sum, 1e-12));
            CHECK(close(r->w_sq_sum, w->w_sq_sum, 1e-12));
            CHECK(l->hist == w->hist);  // grid counts merge exactly
            CHECK(r->hist == w->hist);
        }
    }

    PosteriorAccumulator other(n + 2);
    CHECK_THROWS_AS(left.merge(other), data_error);
}

TEST_CASE("weight histograms bin on the grid and spill past the cap") {
    PosteriorAccumulator acc(2, 1.0);
    const int distinct = PosteriorAccumulator::kHistBins + 6;
    for (int k = 1; k <= distinct; ++k) {
        WeightedGraphState g(2);
        g.set_entry(0, 1, static_cast<double>(k));
        acc.add(g);
        acc.add(g);  // every value lands twice
    }
    const auto* st = acc.stats(0, 1);
    REQUIRE(st != nullptr);
    CHECK(static_cast<int>(st->hist.size()) == PosteriorAccumulator::kHistBins);
    std::int64_t binned = 0;
    for (auto& [gi, cnt] : st->hist) {
        CHECK(cnt == 2);
        binned += cnt;
    }
    CHECK(binned + st->hist_spill == st->presence);
    CHECK(st->hist_spill == 12);

    CHECK_THROWS_AS(PosteriorAccumulator(0), std::invalid_argument);
    CHECK_THROWS_AS(PosteriorAccumulator(3, -0.5), std::invalid_argument);
}

TEST_CASE("point estimate keeps only pairs past even odds") {
    PosteriorAccumulator acc(3);
    auto sample = [&](double w01, double w12, double th) {
        WeightedGraphState g(3);
        if (w01 != 0.0) g.set_entry(0, 1, w01);
        if (w12 != 0.0) g.set_entry(1, 2, w12);
        g.set_theta(0, th);
        acc.add(g);
    };
    sample(1.0, 1.0, 0.4);
    sample(1.0, 1.0, 0.0);
    sample(0.0, 2.0, 0.4);
    sample(0.0, 0.0, 0.0);

    // pi(0,1) = 1/2 exactly: strict comparison drops it
    auto est = mp_estimate(acc);
    CHECK(est.weight(0, 1) == 0.0);
    CHECK(close(est.weight(1, 2), 4.0 / 4.0, 1e-12));
    CHECK(close(est.theta(0), 0.2, 1e-12));
    CHECK(est.theta(1) == 0.0);

    auto est_cond = mp_estimate(acc, true);
    CHECK(close(est_cond.weight(1, 2), 4.0 / 3.0, 1e-12));

    PosteriorAccumulator empty(3);
    CHECK_THROWS_AS(mp_estimate(empty), data_error);
}

TEST_CASE("marginal tables survive a write and read cycle") {
    const int n = 5;
    Rng rng(23, 0);
    auto samples = random_sample_set(n, 40, rng);
    PosteriorAccumulator acc(n);
    for (auto& g : samples) acc.add(g);

    auto path = temp_path("marginals.tsv");
    write_marginals_tsv(path, acc);
    auto rows = read_marginals_tsv(path);
    auto pp = acc.present_pairs();
    REQUIRE(rows.size() == pp.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].i == pp[k].first);
        CHECK(rows[k].j == pp[k].second);
        CHECK(rows[k].pi == acc.pi(pp[k].first, pp[k].second));
        CHECK(rows[k].w_mean == acc.w_mean(pp[k].first, pp[k].second));
        CHECK(rows[k].w_var == acc.w_var(pp[k].first, pp[k].second));
    }

    CHECK_THROWS_AS(read_marginals_tsv("/nonexistent/dir/x.tsv"), data_error);
    auto bad = temp_path("marginals_bad.tsv");
    std::ofstream(bad) << "# comment survives\n0\t1\tnot_a_number\n";
    CHECK_THROWS_AS(read_marginals_tsv(bad), data_error);
}

TEST_CASE("autocorrelation separates white noise from a slow chain") {
    Rng rng(24, 0);
    std::vector<double> white(20000);
    for (double& v : white) v = rng.normal();
    auto aw = autocorrelation(white, 6);
    CHECK(aw.rho[0] == 1.0);
    CHECK_FALSE(aw.degenerate);
    for (int t = 1; t <= 6; ++t) CHECK(std::abs(aw.rho[t]) < 0.05);

    const double phi = 0.9;
    std::vector<double> ar(200000);
    double v = 0;
    for (double& u : ar) {
        v = phi * v + rng.normal();
        u = v;
    }
    auto aa = autocorrelation(ar, 10);
    for (int t = 1; t <= 10; ++t)
        CHECK(std::abs(aa.rho[t] - std::pow(phi, t)) < 0.06);

    std::vector<double> flat(100, 3.5);
    auto af = autocorrelation(flat, 4);
    CHECK(af.degenerate);
    for (double r : af.rho) CHECK(r == 1.0);

    CHECK_THROWS_AS(autocorrelation(flat, 100), std::invalid_argument);
    CHECK_THROWS_AS(autocorrelation(flat, -1), std::invalid_argument);
}

TEST_CASE("integrated time recovers the analytic value for a linear chain") {
    Rng rng(25, 0);
    std::vector<double> white(100000);
    for (double& v : white) v = rng.normal();
    double tau_w = integrated_autocorr_time(white);
    CHECK(tau_w > 0.7);
    CHECK(tau_w < 1.4);

    // an order-one linear recursion has tau = (1 + phi) / (1 - phi)
    const double phi = 0.9;
    std::vector<double> ar(500000);
    double v = 0;
    for (double& u : ar) {
        v = phi * v + rng.normal();
        u = v;
    }
    double tau = integrated_autocorr_time(ar);
    CHECK(tau > 19.0 * 0.8);
    CHECK(tau < 19.0 * 1.25);

    std::vector<double> flat(500, -2.0);
    CHECK(integrated_autocorr_time(flat) == 1.0);
    CHECK(integrated_autocorr_time({1.0}) == 1.0);
}

TEST_CASE("recall over thresholds counts covered qualifying pairs") {
    PosteriorAccumulator acc(4);
    auto add_with = [&](std::vector<std::pair<int, int>> pairs) {
        WeightedGraphState g(4);
        for (auto [i, j] : pairs) g.set_entry(i, j, 1.0);
        acc.add(g);
    };
    for (int k = 0; k < 10; ++k) {
        std::vector<std::pair<int, int>> pairs = {{0, 1}};  // pi = 1.0
        if (k < 7) pairs.push_back({1, 2});                 // pi = 0.7
        if (k < 3) pairs.push_back({2, 3});                 // pi = 0.3
        add_with(pairs);
    }

    // candidate list in scrambled order: canonicalization is on the callee
    std::vector<std::pair<int, int>> cand = {{3, 2}, {1, 0}};
    auto rec = cumulative_recall(cand, acc, {0.0, 0.5, 0.8, 0.99, 1.01});
    REQUIRE(rec.size() == 5);
    CHECK(close(rec[0].second, 2.0 / 3.0, 1e-12));
    CHECK(close(rec[1].second, 1.0 / 2.0, 1e-12));
    CHECK(close(rec[2].second, 1.0, 1e-12));
    CHECK(close(rec[3].second, 1.0, 1e-12));
    CHECK(rec[4].second == 1.0);  // nothing qualifies, nothing is missed
    for (std::size_t k = 0; k < rec.size(); ++k) CHECK(rec[k].first > -1);
}

TEST_CASE("baseline statistics on discrete spin data") {
    const int n = 4, m = 600;
    Dataset x(Dataset::Kind::iid, n, m);
    Rng rng(26, 0);
    for (int c = 0; c < m; ++c) {
        double s = rng.coin(0.5) ? 1.0 : -1.0;
        x.x(0, c) = s;
        x.x(1, c) = s;   // copy of node 0
        x.x(2, c) = -s;  // mirror of node 0
        x.x(3, c) = rng.coin(0.5) ? 1.0 : -1.0;
    }
    auto t = pairwise_baselines(x);
    CHECK(t.bins() == 0);  // two spin states, no rank binning
    CHECK(close(t.pearson(0, 1), 1.0, 1e-12));
    CHECK(close(t.pearson(0, 2), -1.0, 1e-12));
    CHECK(t.pearson_defined(0, 1));
    CHECK(std::abs(t.pearson(0, 3)) < 0.15);

    // a node against its own copy: plug-in information equals the entropy
    CHECK(close(t.mi(0, 1), t.entropy(0), 1e-12));
    CHECK(close(t.entropy(0), std::log(2.0), 0.01));
    CHECK(t.mi(0, 3) < 0.02);
    CHECK(close(t.cov(0, 1), t.cov(0, 0), 1e-12));

    // the symmetric accessors agree
    CHECK(t.pearson(1, 0) == t.pearson(0, 1));
    CHECK(t.mi(2, 0) == t.mi(0, 2));
}

TEST_CASE("baseline statistics rank-bin continuous data") {
    const int n = 3, m = 480;
    Dataset x(Dataset::Kind::iid, n, m);
    Rng rng(27, 0);
    for (int c = 0; c < m; ++c) {
        double z = rng.normal();
        x.x(0, c) = z;
        x.x(1, c) = z + 0.05 * rng.normal();
        x.x(2, c) = rng.normal();
    }
    auto t = pairwise_baselines(x, 8);
    CHECK(t.bins() == 8);
    CHECK(t.pearson(0, 1) > 0.99);
    CHECK(t.mi(0, 1) > 3 * t.mi(0, 2));
    // equal-frequency bins give every node the full alphabet entropy
    CHECK(close(t.entropy(0), std::log(8.0), 0.01));

    CHECK_THROWS_AS(pairwise_baselines(x, 1), std::invalid_argument);
    Dataset short_x(Dataset::Kind::iid, 2, 1);
    CHECK_THROWS_AS(pairwise_baselines(short_x), data_error);
}

TEST_CASE("constant nodes have no defined correlation") {
    Dataset x(Dataset::Kind::iid, 2, 50);
    Rng rng(28, 0);
    for (int c = 0; c < 50; ++c) {
        x.x(0, c) = 1.0;
        x.x(1, c) = rng.coin(0.5) ? 1.0 : -1.0;
    }
    auto t = pairwise_baselines(x);
    CHECK_FALSE(t.pearson_defined(0, 1));
    CHECK(t.entropy(0) == 0.0);
}

TEST_CASE("consistency bounds hold on real tables and catch planted breaks") {
    const int n = 8, m = 300;
    Dataset x(Dataset::Kind::iid, n, m);
    Rng rng(29, 0);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) x.x(i, c) = rng.coin(0.5) ? 1.0 : -1.0;
    // correlate a few nodes so the bounds are exercised away from zero
    for (int c = 0; c < m; ++c) {
        if (rng.coin(0.8)) x.x(1, c) = x.x(0, c);
        if (rng.coin(0.8)) x.x(2, c) = x.x(1, c);
    }
    auto t = pairwise_baselines(x);
    CHECK(pearson_bound_violations(t) == 0);
    CHECK(mi_bound_violations(t) == 0);

    // hand-built tables that break each inequality exactly once
    BaselineTable bad(3, 0);
    bad.set(0, 1, 0.0, 0.99, true, 0.6);
    bad.set(1, 2, 0.0, 0.99, true, 0.6);
    bad.set(0, 2, 0.0, 0.90, true, 0.3);
    bad.set_entropy(0, 0.7);
    bad.set_entropy(1, 0.7);
    bad.set_entropy(2, 0.7);
    CHECK(pearson_bound_violations(bad) == 1);
    CHECK(mi_bound_violations(bad) == 1);

    BaselineTable ok(3, 0);
    ok.set(0, 1, 0.0, 0.99, true, 0.6);
    ok.set(1, 2, 0.0, 0.99, true, 0.6);
    ok.set(0, 2, 0.0, 0.97, true, 0.55);
    ok.set_entropy(0, 0.7);
    ok.set_entropy(1, 0.7);
    ok.set_entropy(2, 0.7);
    CHECK(pearson_bound_violations(ok) == 0);
    CHECK(mi_bound_violations(ok) == 0);
}

TEST_CASE("ranked comparison walks the score order against a reference") {
    // six pairs of four nodes, scores fixed by hand
    std::vector<std::tuple<int, int, double>> scores = {
        {0, 1, 9.0}, {2, 0, 7.0}, {0, 3, 5.0},
        {1, 2, 3.0}, {3, 1, 2.0}, {2, 3, 1.0},
    };
    std::vector<std::pair<int, int>> ref = {{0, 1}, {0, 2}};
    auto r = threshold_reconstruction_compare(scores, ref);
    REQUIRE(r.order.size() == 6);
    CHECK(r.order[0] == std::pair{0, 1});
    CHECK(r.order[1] == std::pair{0, 2});  // canonicalized from (2,0)
    CHECK(close(r.tpr[0], 0.5, 1e-12));
    CHECK(close(r.tpr[1], 1.0, 1e-12));
    CHECK(close(r.jaccard[1], 1.0, 1e-12));
    CHECK(close(r.jaccard[2], 2.0 / 3.0, 1e-12));
    CHECK(close(r.jaccard[5], 2.0 / 6.0, 1e-12));
    CHECK(r.fraction.back() == 1.0);
    for (std::size_t k = 1; k < r.tpr.size(); ++k)
        CHECK(r.tpr[k] >= r.tpr[k - 1]);

    // reversing the scores sinks the reference to the bottom
    for (auto& [i, j, s] : scores) s = -s;
    auto rev = threshold_reconstruction_compare(scores, ref);
    CHECK(rev.tpr[1] == 0.0);
    CHECK(rev.tpr[5] == 1.0);

    // not-a-number scores rank last, ties break on the pair itself
    std::vector<std::tuple<int, int, double>> odd = {
        {0, 1, std::nan("")}, {1, 2, 4.0}, {0, 2, 4.0}};
    auto ro = threshold_reconstruction_compare(odd, {{0, 1}});
    CHECK(ro.order[0] == std::pair{0, 2});
    CHECK(ro.order[1] == std::pair{1, 2});
    CHECK(ro.order[2] == std::pair{0, 1});
}

}  // TEST_SUITE
