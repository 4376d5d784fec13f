#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "netrecon/dataset.hpp"
#include "netrecon/errors.hpp"

using namespace netrecon;

namespace {

std::string temp_path(const char* name) {
    return std::string("/tmp/netrecon_dataset_test_") + name;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("model tags map both ways") {
    CHECK(model_kind_from_string("kinetic-ising") == ModelKind::kinetic_ising);
    CHECK(model_kind_from_string("equilibrium-ising") == ModelKind::equilibrium_ising);
    CHECK(model_kind_from_string("zero-ising") == ModelKind::zero_ising);
    CHECK(model_kind_from_string("gaussian") == ModelKind::gaussian);
    for (auto k : {ModelKind::kinetic_ising, ModelKind::equilibrium_ising,
                   ModelKind::zero_ising, ModelKind::gaussian})
        CHECK(model_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(model_kind_from_string("isingk"), config_error);
    CHECK(model_is_iid(ModelKind::gaussian));
    CHECK(model_is_iid(ModelKind::equilibrium_ising));
    CHECK_FALSE(model_is_iid(ModelKind::kinetic_ising));
}

TEST_CASE("sample and column indexing per kind") {
    Dataset iid(Dataset::Kind::iid, 3, 5);
    CHECK(iid.n_samples() == 5);
    CHECK(iid.src_col(4) == 4);
    CHECK_THROWS(iid.tgt_col(0));

    Dataset chain(Dataset::Kind::chain, 3, 5);
    CHECK(chain.n_samples() == 4);
    CHECK(chain.src_col(0) == 0);
    CHECK(chain.tgt_col(0) == 1);
    CHECK(chain.src_col(3) == 3);
    CHECK(chain.tgt_col(3) == 4);

    Dataset par(Dataset::Kind::parallel, 3, 6);
    CHECK(par.n_samples() == 3);
    CHECK(par.src_col(2) == 4);
    CHECK(par.tgt_col(2) == 5);

    CHECK_THROWS(Dataset(Dataset::Kind::chain, 3, 1));
    CHECK_THROWS(Dataset(Dataset::Kind::parallel, 3, 5));
    CHECK_THROWS(Dataset(Dataset::Kind::iid, 0, 5));
    CHECK_THROWS(Dataset(Dataset::Kind::iid, 3, 0));
}

TEST_CASE("kind strings round-trip") {
    for (auto k : {Dataset::Kind::iid, Dataset::Kind::chain, Dataset::Kind::parallel})
        CHECK(Dataset::kind_from_string(Dataset::kind_to_string(k)) == k);
    CHECK_THROWS_AS(Dataset::kind_from_string("sideways"), data_error);
}

TEST_CASE("csv round-trips values, kind and model tag") {
    Dataset d(Dataset::Kind::chain, 4, 3);
    d.set_model_tag("kinetic-ising");
    double v = -1.0;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 4; ++i) {
            d.x(i, c) = v;
            v = -v;
        }
    auto path = temp_path("roundtrip.csv");
    d.write_csv(path);
    Dataset e = Dataset::read_csv(path);
    CHECK(e.kind() == Dataset::Kind::chain);
    CHECK(e.n_nodes() == 4);
    CHECK(e.n_cols() == 3);
    CHECK(e.n_samples() == 2);
    CHECK(e.model_tag() == "kinetic-ising");
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 4; ++i) CHECK(e.x(i, c) == d.x(i, c));
    std::remove(path.c_str());
}

TEST_CASE("csv preserves full double precision") {
    Dataset d(Dataset::Kind::iid, 2, 2);
    d.set_model_tag("gaussian");
    d.x(0, 0) = 0.1 + 0.2;
    d.x(1, 0) = -1.2345678901234567e-8;
    d.x(0, 1) = 3.141592653589793;
    d.x(1, 1) = 1e300;
    auto path = temp_path("precision.csv");
    d.write_csv(path);
    Dataset e = Dataset::read_csv(path);
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 2; ++i) CHECK(e.x(i, c) == d.x(i, c));
    std::remove(path.c_str());
}

TEST_CASE("validate_for enforces state spaces") {
    Dataset spins(Dataset::Kind::chain, 2, 3);
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 2; ++i) spins.x(i, c) = (i + c) % 2 ? 1.0 : -1.0;
    CHECK_NOTHROW(spins.validate_for(ModelKind::kinetic_ising));

    // iid model fed markov data and vice versa
    CHECK_THROWS_AS(spins.validate_for(ModelKind::gaussian), data_error);
    Dataset cols(Dataset::Kind::iid, 2, 3);
    CHECK_THROWS_AS(cols.validate_for(ModelKind::kinetic_ising), data_error);

    // a zero is fine for zero-ising but not for the two-state models
    Dataset z(Dataset::Kind::iid, 2, 2);
    z.x(0, 0) = 1.0;
    z.x(1, 0) = 0.0;
    z.x(0, 1) = -1.0;
    z.x(1, 1) = 1.0;
    CHECK_NOTHROW(z.validate_for(ModelKind::zero_ising));
    CHECK_THROWS_AS(z.validate_for(ModelKind::equilibrium_ising), data_error);
    CHECK_NOTHROW(z.validate_for(ModelKind::gaussian));

    // non-finite values fail even for the continuous model
    Dataset g(Dataset::Kind::iid, 1, 1);
    g.x(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(g.validate_for(ModelKind::gaussian), data_error);
}

TEST_CASE("csv rejects missing files and malformed headers") {
    CHECK_THROWS_AS(Dataset::read_csv("/nonexistent/data.csv"), data_error);

    auto path = temp_path("noheader.csv");
    {
        std::ofstream out(path);
        out << "1,2,3\n";
    }
    CHECK_THROWS_AS(Dataset::read_csv(path), data_error);

    {
        std::ofstream out(path);
        out << "# N=2 M=1 kind=banana model=gaussian\n1,2\n";
    }
    CHECK_THROWS_AS(Dataset::read_csv(path), data_error);

    // wrong number of values in a row
    {
        std::ofstream out(path);
        out << "# N=3 M=1 kind=iid model=gaussian\n1,2\n";
    }
    CHECK_THROWS_AS(Dataset::read_csv(path), data_error);
    std::remove(path.c_str());
}

}  // TEST_SUITE
