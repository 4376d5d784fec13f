#include <doctest.h>

#include <cmath>
#include <vector>

#include "netrecon/math_util.hpp"

using namespace netrecon;

TEST_SUITE("math") {

TEST_CASE("log_2cosh matches libm across magnitudes") {
    for (double h : {0.0, 1e-12, 0.3, -0.7, 5.0, -30.0, 200.0, -354.0, 400.0,
                     1e4, -1e8}) {
        double ref = log_2cosh_ref(h);
        CHECK(log_2cosh(h) == doctest::Approx(ref).epsilon(1e-14));
    }
    // deep overflow region reduces to |h|
    CHECK(log_2cosh(1e300) == 1e300);
    CHECK(log_2cosh(-1e300) == 1e300);
}

TEST_CASE("log_1p_2cosh matches libm and its definition") {
    for (double h : {0.0, 0.1, -0.9, 3.0, -12.0, 100.0, 354.0, -400.0}) {
        CHECK(log_1p_2cosh(h) ==
              doctest::Approx(log_1p_2cosh_ref(h)).epsilon(1e-14));
        if (std::abs(h) < 300) {
            double direct = std::log(1.0 + 2.0 * std::cosh(h));
            CHECK(log_1p_2cosh(h) == doctest::Approx(direct).epsilon(1e-12));
        }
    }
    CHECK(log_1p_2cosh(0.0) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("batch kernels equal their scalar loops") {
    std::vector<double> h = {0.3, -1.2, 4.0, 0.0, -0.05, 17.0};
    std::vector<double> x = {1.0, -1.0, 1.0, -1.0, 1.0, -1.0};
    double dw = 0.37;

    double want = 0;
    for (std::size_t i = 0; i < h.size(); ++i) want += log_2cosh_ref(h[i]);
    CHECK(sum_log_2cosh(h.data(), h.size()) ==
          doctest::Approx(want).epsilon(1e-14));

    want = 0;
    for (std::size_t i = 0; i < h.size(); ++i)
        want += log_2cosh_ref(h[i] + dw * x[i]);
    CHECK(sum_log_2cosh_shift(h.data(), x.data(), dw, h.size()) ==
          doctest::Approx(want).epsilon(1e-14));

    want = 0;
    for (std::size_t i = 0; i < h.size(); ++i)
        want += log_1p_2cosh_ref(h[i] + 0.11);
    CHECK(sum_log_1p_2cosh_const_shift(h.data(), 0.11, h.size()) ==
          doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("log_factorial agrees with a direct product") {
    double acc = 0.0;
    CHECK(log_factorial(0) == 0.0);
    for (int k = 1; k <= 40; ++k) {
        acc += std::log(static_cast<double>(k));
        CHECK(log_factorial(k) == doctest::Approx(acc).epsilon(1e-13));
    }
    // large argument through lgamma
    CHECK(log_factorial(5000) ==
          doctest::Approx(std::lgamma(5001.0)).epsilon(1e-13));
}

TEST_CASE("log_binomial identities") {
    CHECK(log_binomial(10, 0) == doctest::Approx(0.0));
    CHECK(log_binomial(10, 10) == doctest::Approx(0.0));
    CHECK(log_binomial(10, 3) == doctest::Approx(std::log(120.0)));
    CHECK(log_binomial(5, 6) == NEG_INF);
    CHECK(log_binomial(5, -1) == NEG_INF);
    // Pascal rule on a grid of arguments
    for (int n = 1; n <= 30; ++n)
        for (int k = 1; k < n; ++k) {
            double lhs = log_binomial(n, k);
            double rhs = std::log(std::exp(log_binomial(n - 1, k - 1)) +
                                  std::exp(log_binomial(n - 1, k)));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
}

TEST_CASE("log_multiset counts combinations with repetition") {
    // ((n, m)) = C(n + m - 1, m); spot value ((3, 2)) = 6
    CHECK(log_multiset(3, 2) == doctest::Approx(std::log(6.0)));
    for (int n = 1; n <= 12; ++n)
        for (int m = 0; m <= 12; ++m)
            CHECK(log_multiset(n, m) ==
                  doctest::Approx(log_binomial(n + m - 1, m)).epsilon(1e-13));
}

TEST_CASE("log_double_factorial_even") {
    // (2k)!! = 2^k k!
    CHECK(log_double_factorial_even(0) == doctest::Approx(0.0));
    CHECK(log_double_factorial_even(6) == doctest::Approx(std::log(48.0)));
    CHECK(log_double_factorial_even(10) == doctest::Approx(std::log(3840.0)));
}

TEST_CASE("log_sum_exp") {
    std::vector<double> v = {0.0, std::log(2.0), std::log(3.0)};
    CHECK(log_sum_exp(v) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
    std::vector<double> shifted = {1000.0, 1000.0 + std::log(2.0)};
    CHECK(log_sum_exp(shifted) ==
          doctest::Approx(1000.0 + std::log(3.0)).epsilon(1e-14));
    std::vector<double> with_ninf = {NEG_INF, 0.0};
    CHECK(log_sum_exp(with_ninf) == doctest::Approx(0.0));
    std::vector<double> all_ninf = {NEG_INF, NEG_INF};
    CHECK(log_sum_exp(all_ninf) == NEG_INF);
}

}  // TEST_SUITE
