#include "netrecon/math_util.hpp"

#include <algorithm>
#include <stdexcept>

namespace netrecon {

namespace {

constexpr std::size_t FACT_TABLE_SIZE = 1 << 16;

const std::vector<double>& factorial_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(FACT_TABLE_SIZE);
        for (std::size_t n = 0; n < FACT_TABLE_SIZE; ++n)
            t[n] = std::lgamma(static_cast<double>(n) + 1.0);
        return t;
    }();
    return table;
}

}  // namespace

double log_factorial(std::int64_t n) {
    if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
    if (static_cast<std::uint64_t>(n) < FACT_TABLE_SIZE)
        return factorial_table()[static_cast<std::size_t>(n)];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_double_factorial_even(std::int64_t m) {
    if (m < 0 || (m & 1))
        throw std::invalid_argument(
            "log_double_factorial_even: argument must be even and >= 0");
    std::int64_t k = m / 2;
    return k * 6.93147180559945309417e-01 + log_factorial(k);
}

double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return NEG_INF;
    if (k == 0 || k == n) return 0.0;
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_multiset(std::int64_t n, std::int64_t m) {
    if (m < 0) return NEG_INF;
    if (m == 0) return 0.0;
    if (n <= 0) return NEG_INF;
    return log_binomial(n + m - 1, m);
}

double log_sum_exp(const std::vector<double>& v) {
    double mx = NEG_INF;
    for (double x : v) mx = std::max(mx, x);
    if (mx == NEG_INF) return NEG_INF;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

}  // namespace netrecon
