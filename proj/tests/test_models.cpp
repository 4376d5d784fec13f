#include <doctest.h>

#include <cmath>
#include <vector>

#include "netrecon/dataset.hpp"
#include "netrecon/errors.hpp"
#include "netrecon/graph_state.hpp"
#include "netrecon/models.hpp"
#include "netrecon/rng.hpp"

using namespace netrecon;

namespace {

// Straight-line transcription of the model definitions, no caches and no
// batch kernels. Every incremental path in the library is measured against
// this.
double naive_ll(const Dataset& X, const WeightedGraphState& g, ModelKind kind) {
    int n = g.size();
    int m = X.n_samples();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int s = 0; s < m; ++s) {
            double h = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) h += g.weight(i, j) * X.x(j, X.src_col(s));
            if (kind == ModelKind::gaussian) {
                double th = g.theta(i);
                double mean = -th * th * h;
                double r = X.x(i, s) - mean;
                total += -r * r / (2.0 * th * th) -
                         0.5 * std::log(2.0 * M_PI * th * th);
            } else {
                h += g.theta(i);
                double y = X.x(i, kind == ModelKind::kinetic_ising
                                      ? X.tgt_col(s)
                                      : X.src_col(s));
                double norm = kind == ModelKind::zero_ising
                                  ? std::log(1.0 + 2.0 * std::cosh(h))
                                  : std::log(2.0 * std::cosh(h));
                total += y * h - norm;
            }
        }
    }
    return total;
}

WeightedGraphState random_graph(int n, int n_edges, double theta_lo,
                                double theta_hi, Rng& rng) {
    WeightedGraphState g(n);
    for (int k = 0; k < n_edges; ++k) {
        int i = rng.below_int(n), j = rng.below_int(n);
        if (i != j) g.set_entry(i, j, rng.uniform_in(-1.2, 1.2));
    }
    for (int i = 0; i < n; ++i) g.set_theta(i, rng.uniform_in(theta_lo, theta_hi));
    return g;
}

Dataset random_spins(Dataset::Kind kind, int n, int cols, bool allow_zero,
                     Rng& rng) {
    Dataset ds(kind, n, cols);
    for (int c = 0; c < cols; ++c)
        for (int i = 0; i < n; ++i) {
            if (allow_zero && rng.coin(1.0 / 3.0)) ds.x(i, c) = 0.0;
            else ds.x(i, c) = rng.coin(0.5) ? 1.0 : -1.0;
        }
    return ds;
}

Dataset dataset_for(ModelKind kind, int n, int samples, Rng& rng) {
    switch (kind) {
        case ModelKind::kinetic_ising:
            return random_spins(Dataset::Kind::chain, n, samples + 1, false, rng);
        case ModelKind::equilibrium_ising:
            return random_spins(Dataset::Kind::iid, n, samples, false, rng);
        case ModelKind::zero_ising:
            return random_spins(Dataset::Kind::iid, n, samples, true, rng);
        case ModelKind::gaussian: {
            Dataset ds(Dataset::Kind::iid, n, samples);
            for (int c = 0; c < samples; ++c)
                for (int i = 0; i < n; ++i) ds.x(i, c) = rng.normal(0.0, 1.0);
            return ds;
        }
    }
    throw std::logic_error("unreachable");
}

const ModelKind ALL_KINDS[] = {ModelKind::kinetic_ising,
                               ModelKind::equilibrium_ising,
                               ModelKind::zero_ising, ModelKind::gaussian};

}  // namespace

TEST_SUITE("models") {

TEST_CASE("log likelihood matches a naive reimplementation") {
    Rng rng(314, 0);
    for (ModelKind kind : ALL_KINDS) {
        double theta_lo = kind == ModelKind::gaussian ? 0.3 : -0.6;
        double theta_hi = kind == ModelKind::gaussian ? 1.5 : 0.6;
        for (int rep = 0; rep < 5; ++rep) {
            auto g = random_graph(6, 10, theta_lo, theta_hi, rng);
            auto X = dataset_for(kind, 6, 9, rng);
            double got = log_likelihood(X, g, kind);
            double want = naive_ll(X, g, kind);
            CHECK(std::abs(got - want) < 1e-9 * (1.0 + std::abs(want)));
        }
    }
}

TEST_CASE("transition probabilities sum to one over all successor states") {
    Rng rng(27, 0);
    const int n = 4;
    auto g = random_graph(n, 6, -0.5, 0.5, rng);
    Dataset X(Dataset::Kind::chain, n, 2);
    for (int i = 0; i < n; ++i) X.x(i, 0) = rng.coin(0.5) ? 1.0 : -1.0;
    double total = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
        for (int i = 0; i < n; ++i) X.x(i, 1) = (mask >> i) & 1 ? 1.0 : -1.0;
        total += std::exp(log_likelihood(X, g, ModelKind::kinetic_ising));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-node conditionals are normalized over the state space") {
    // with one node there are no couplings, so the likelihood is exactly the
    // single-site conditional and must sum (or integrate) to one
    for (double th : {-0.8, 0.0, 1.3}) {
        WeightedGraphState g(1);
        g.set_theta(0, th);
        Dataset X(Dataset::Kind::iid, 1, 1);

        double sum2 = 0.0;
        for (double s : {-1.0, 1.0}) {
            X.x(0, 0) = s;
            sum2 += std::exp(log_likelihood(X, g, ModelKind::equilibrium_ising));
        }
        CHECK(sum2 == doctest::Approx(1.0).epsilon(1e-12));

        double sum3 = 0.0;
        for (double s : {-1.0, 0.0, 1.0}) {
            X.x(0, 0) = s;
            sum3 += std::exp(log_likelihood(X, g, ModelKind::zero_ising));
        }
        CHECK(sum3 == doctest::Approx(1.0).epsilon(1e-12));
    }

    // gaussian: integrate the single-node density on a fine grid
    WeightedGraphState g(1);
    g.set_theta(0, 0.7);
    Dataset X(Dataset::Kind::iid, 1, 1);
    double integral = 0.0, dx = 1e-3;
    for (double x = -8.0; x < 8.0; x += dx) {
        X.x(0, 0) = x + dx / 2;
        integral += std::exp(log_likelihood(X, g, ModelKind::gaussian)) * dx;
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("conditionals agree with the enumerated equilibrium distribution") {
    // Enumerate the three-node Boltzmann distribution exactly and check that
    // its conditional P(x_0 | x_1, x_2) equals the model's single-site
    // factor with the local field folded into theta.
    const int n = 3;
    Rng rng(8, 0);
    auto g = random_graph(n, 3, -0.7, 0.7, rng);

    auto energy_exp = [&](const std::vector<double>& s) {
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            e += g.theta(i) * s[i];
            for (int j = i + 1; j < n; ++j) e += g.weight(i, j) * s[i] * s[j];
        }
        return std::exp(e);
    };

    std::vector<double> s(n);
    for (int rest = 0; rest < 4; ++rest) {
        s[1] = rest & 1 ? 1.0 : -1.0;
        s[2] = rest & 2 ? 1.0 : -1.0;
        s[0] = 1.0;
        double up = energy_exp(s);
        s[0] = -1.0;
        double down = energy_exp(s);
        double want = up / (up + down);

        double h = g.theta(0) + g.weight(0, 1) * s[1] + g.weight(0, 2) * s[2];
        WeightedGraphState single(1);
        single.set_theta(0, h);
        Dataset X(Dataset::Kind::iid, 1, 1);
        X.x(0, 0) = 1.0;
        double got =
            std::exp(log_likelihood(X, single, ModelKind::equilibrium_ising));
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("field cache stays in sync through incremental updates") {
    Rng rng(11, 0);
    const int n = 8, samples = 7;
    for (auto dkind : {Dataset::Kind::chain, Dataset::Kind::parallel,
                       Dataset::Kind::iid}) {
        int cols = dkind == Dataset::Kind::chain    ? samples + 1
                   : dkind == Dataset::Kind::parallel ? 2 * samples
                                                      : samples;
        auto X = random_spins(dkind, n, cols, false, rng);
        WeightedGraphState g(n);
        FieldCache cache;
        cache.build(g, X);
        for (int step = 0; step < 300; ++step) {
            int i = rng.below_int(n), j = rng.below_int(n);
            if (i == j) continue;
            double w = rng.coin(0.25) ? 0.0 : rng.uniform_in(-1.0, 1.0);
            double prev = g.set_entry(i, j, w);
            cache.apply_entry_delta(g, X, i, j, w - prev);
        }
        FieldCache fresh;
        fresh.build(g, X);
        for (int i = 0; i < n; ++i)
            for (int m = 0; m < cache.n_samples(); ++m)
                CHECK(cache.row(i)[m] ==
                      doctest::Approx(fresh.row(i)[m]).epsilon(1e-12));
    }
}

TEST_CASE("field cache resyncs itself after enough accepted updates") {
    Rng rng(12, 0);
    auto X = random_spins(Dataset::Kind::iid, 4, 5, false, rng);
    WeightedGraphState g(4);
    FieldCache cache;
    cache.build(g, X);
    cache.resync_interval = 5;
    for (int k = 0; k < 4; ++k) {
        double prev = g.set_entry(0, 1 + k % 3, 0.5);
        cache.apply_entry_delta(g, X, 0, 1 + k % 3, 0.5 - prev);
    }
    CHECK(cache.accepted_since_sync() == 4);
    double prev = g.set_entry(2, 3, -0.25);
    cache.apply_entry_delta(g, X, 2, 3, -0.25 - prev);
    CHECK(cache.accepted_since_sync() == 0);
    CHECK(cache.resync_interval == 5);
    cache.force_sync(g, X);
    CHECK(cache.accepted_since_sync() == 0);
}

TEST_CASE("entry evaluator matches full recomputation") {
    Rng rng(2718, 0);
    const int n = 6, samples = 8;
    for (ModelKind kind : ALL_KINDS) {
        double theta_lo = kind == ModelKind::gaussian ? 0.3 : -0.6;
        double theta_hi = kind == ModelKind::gaussian ? 1.4 : 0.6;
        auto g = random_graph(n, 8, theta_lo, theta_hi, rng);
        auto X = dataset_for(kind, n, samples, rng);
        FieldCache cache;
        cache.build(g, X);
        EvalScratch scratch;
        double base = log_likelihood(X, g, kind);
        for (int step = 0; step < 150; ++step) {
            int i = rng.below_int(n), j = rng.below_int(n);
            if (i == j) continue;
            EntryEval ev(X, g, cache, kind, i, j, scratch);
            double w_new = rng.coin(0.2) ? 0.0 : rng.uniform_in(-1.2, 1.2);
            CHECK(ev.w_old() == g.weight(i, j));

            double w_old = g.set_entry(i, j, w_new);
            double full = log_likelihood(X, g, kind) - base;
            CHECK(std::abs(ev.delta_ll(w_new) - full) <
                  1e-9 * (1.0 + std::abs(base)));

            if (rng.coin(0.5)) {
                // keep the move so later evaluations see varied graphs
                cache.apply_entry_delta(g, X, i, j, w_new - w_old);
                base += full;
            } else {
                g.set_entry(i, j, w_old);
            }
        }
    }
}

TEST_CASE("node evaluator matches full recomputation") {
    Rng rng(1618, 0);
    const int n = 6, samples = 8;
    for (ModelKind kind : ALL_KINDS) {
        bool gauss = kind == ModelKind::gaussian;
        auto g = random_graph(n, 8, gauss ? 0.3 : -0.6, gauss ? 1.4 : 0.6, rng);
        auto X = dataset_for(kind, n, samples, rng);
        FieldCache cache;
        cache.build(g, X);
        EvalScratch scratch;
        double base = log_likelihood(X, g, kind);
        for (int step = 0; step < 100; ++step) {
            int i = rng.below_int(n);
            NodeEval ev(X, g, cache, kind, i, scratch);
            CHECK(ev.theta_old() == g.theta(i));
            double th_new = gauss ? rng.uniform_in(0.2, 1.6)
                                  : rng.uniform_in(-1.0, 1.0);
            double th_old = g.theta(i);
            g.set_theta(i, th_new);
            double full = log_likelihood(X, g, kind) - base;
            CHECK(std::abs(ev.delta_ll(th_new) - full) <
                  1e-9 * (1.0 + std::abs(base)));
            if (rng.coin(0.5)) base += full;
            else g.set_theta(i, th_old);
        }
    }
}

TEST_CASE("edge set evaluator scores grouped moves with pinned companions") {
    Rng rng(4242, 0);
    const int n = 7, samples = 6;
    for (ModelKind kind : ALL_KINDS) {
        bool gauss = kind == ModelKind::gaussian;
        auto g = random_graph(n, 10, gauss ? 0.4 : -0.5, gauss ? 1.3 : 0.5, rng);
        auto X = dataset_for(kind, n, samples, rng);
        FieldCache cache;
        cache.build(g, X);
        double base = log_likelihood(X, g, kind);
        for (int rep = 0; rep < 40; ++rep) {
            // a handful of distinct pairs, some existing edges, some not
            std::vector<std::pair<int, int>> pool;
            while (pool.size() < 5) {
                int i = rng.below_int(n), j = rng.below_int(n);
                if (i == j) continue;
                if (i > j) std::swap(i, j);
                bool dup = false;
                for (auto& p : pool) dup = dup || p == std::pair{i, j};
                if (!dup) pool.emplace_back(i, j);
            }
            std::vector<std::pair<int, int>> moved(pool.begin(), pool.begin() + 3);
            std::vector<std::pair<std::pair<int, int>, double>> pinned;
            pinned.push_back({pool[3], rng.uniform_in(-1.0, 1.0)});
            pinned.push_back({pool[4], 0.0});

            EdgeSetEval ev(X, g, cache, kind, moved, pinned);
            double w_new = rng.coin(0.2) ? 0.0 : rng.uniform_in(-1.0, 1.0);

            // oracle: apply everything to a copy and recompute from scratch
            WeightedGraphState h = g;
            for (auto& p : moved) h.set_entry(p.first, p.second, w_new);
            for (auto& [p, w] : pinned) h.set_entry(p.first, p.second, w);
            double full = log_likelihood(X, h, kind) - base;
            CHECK(std::abs(ev.delta_ll(w_new) - full) <
                  1e-9 * (1.0 + std::abs(base)));
        }
    }
}

TEST_CASE("kinetic simulator reproduces its own transition law") {
    WeightedGraphState g(2);
    g.set_entry(0, 1, 0.8);
    g.set_theta(0, 0.3);
    g.set_theta(1, -0.2);
    Rng rng(555, 0);
    auto ds = simulate_kinetic_ising(g, 40000, Dataset::Kind::parallel, rng);
    CHECK(ds.kind() == Dataset::Kind::parallel);
    CHECK(ds.n_samples() == 40000);
    CHECK(ds.model_tag() == "kinetic-ising");
    ds.validate_for(ModelKind::kinetic_ising);

    // empirical P(x_0' = +1) conditioned on the source state of node 1
    double up[2] = {0, 0}, tot[2] = {0, 0};
    for (int m = 0; m < ds.n_samples(); ++m) {
        int bin = ds.x(1, ds.src_col(m)) > 0 ? 1 : 0;
        tot[bin] += 1;
        up[bin] += ds.x(0, ds.tgt_col(m)) > 0 ? 1 : 0;
    }
    for (int bin = 0; bin < 2; ++bin) {
        double h = 0.3 + 0.8 * (bin ? 1.0 : -1.0);
        double want = 1.0 / (1.0 + std::exp(-2.0 * h));
        CHECK(up[bin] / tot[bin] == doctest::Approx(want).epsilon(0.03));
    }

    // chain variant stores one more column than transitions
    Rng rng2(556, 0);
    auto chain = simulate_kinetic_ising(g, 100, Dataset::Kind::chain, rng2);
    CHECK(chain.n_cols() == 101);
    CHECK(chain.n_samples() == 100);
    chain.validate_for(ModelKind::kinetic_ising);

    CHECK_THROWS(simulate_kinetic_ising(g, 10, Dataset::Kind::iid, rng2));
    CHECK_THROWS(simulate_kinetic_ising(g, 0, Dataset::Kind::chain, rng2));
}

TEST_CASE("gaussian simulator matches the implied covariance") {
    WeightedGraphState g(2, 1.0);
    g.set_entry(0, 1, -0.5);
    Rng rng(777, 0);
    auto ds = simulate_gaussian(g, 200000, rng);
    CHECK(ds.kind() == Dataset::Kind::iid);
    CHECK(ds.model_tag() == "gaussian");

    // precision [[1, -0.5], [-0.5, 1]] inverts to [[4/3, 2/3], [2/3, 4/3]]
    double c00 = 0, c01 = 0, c11 = 0, m0 = 0, m1 = 0;
    int m = ds.n_samples();
    for (int k = 0; k < m; ++k) {
        m0 += ds.x(0, k);
        m1 += ds.x(1, k);
    }
    m0 /= m;
    m1 /= m;
    for (int k = 0; k < m; ++k) {
        double a = ds.x(0, k) - m0, b = ds.x(1, k) - m1;
        c00 += a * a;
        c01 += a * b;
        c11 += b * b;
    }
    CHECK(c00 / m == doctest::Approx(4.0 / 3.0).epsilon(0.05));
    CHECK(c11 / m == doctest::Approx(4.0 / 3.0).epsilon(0.05));
    CHECK(c01 / m == doctest::Approx(2.0 / 3.0).epsilon(0.05));
}

TEST_CASE("gaussian simulator rejects indefinite precision matrices") {
    WeightedGraphState g(2, 1.0);
    g.set_entry(0, 1, 2.0);  // determinant 1 - 4 < 0
    Rng rng(1, 0);
    CHECK_THROWS_AS(simulate_gaussian(g, 10, rng), numeric_error);

    WeightedGraphState h(2, 1.0);
    h.set_theta(0, 0.0);
    CHECK_THROWS_AS(simulate_gaussian(h, 10, rng), numeric_error);
}

TEST_CASE("likelihood rejects mismatched inputs") {
    Rng rng(3, 0);
    auto X = random_spins(Dataset::Kind::iid, 4, 3, false, rng);
    WeightedGraphState g(5);
    CHECK_THROWS(log_likelihood(X, g, ModelKind::equilibrium_ising));

    // gaussian with a nonpositive node parameter is a numeric failure
    WeightedGraphState h(4, 1.0);
    h.set_theta(1, 0.0);
    Dataset Xg(Dataset::Kind::iid, 4, 3);
    CHECK_THROWS_AS(log_likelihood(Xg, h, ModelKind::gaussian), numeric_error);
}

}  // TEST_SUITE
