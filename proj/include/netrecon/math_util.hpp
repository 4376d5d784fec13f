#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <vector>

namespace netrecon {

constexpr double NEG_INF = -std::numeric_limits<double>::infinity();

namespace detail {

// exp(-y) for y in [0, 708], accurate to ~1e-15 relative. Plain arithmetic
// only (no libm calls) so loops over samples can be vectorized.
inline double exp_neg(double y) {
    constexpr double INV_LN2 = 1.4426950408889634074;
    constexpr double LN2_HI = 6.93147180369123816490e-01;
    constexpr double LN2_LO = 1.90821492927058770002e-10;
    int k = static_cast<int>(y * INV_LN2 + 0.5);
    double r = (y - k * LN2_HI) - k * LN2_LO;
    double t = -r;  // |t| <= 0.3466
    double p = 1.0 / 3628800.0;
    p = p * t + 1.0 / 362880.0;
    p = p * t + 1.0 / 40320.0;
    p = p * t + 1.0 / 5040.0;
    p = p * t + 1.0 / 720.0;
    p = p * t + 1.0 / 120.0;
    p = p * t + 1.0 / 24.0;
    p = p * t + 1.0 / 6.0;
    p = p * t + 0.5;
    p = p * t + 1.0;
    p = p * t + 1.0;
    // scale by 2^-k through the exponent bits; k in [0, 1022]
    std::uint64_t bits = static_cast<std::uint64_t>(1023 - k) << 52;
    return p * std::bit_cast<double>(bits);
}

// log(1 + t) for t in [0, 2], absolute error ~1e-16.
inline double log1p_unit(double t) {
    constexpr double LN2 = 6.93147180559945309417e-01;
    double u = 1.0 + t;
    bool halve = u > 1.5;
    double num = halve ? (t - 1.0) * 0.5 : t;
    double den = halve ? (3.0 + t) * 0.5 : 2.0 + t;
    double c = halve ? LN2 : 0.0;
    double s = num / den;
    double s2 = s * s;
    double q = 2.0 / 17.0;
    q = q * s2 + 2.0 / 15.0;
    q = q * s2 + 2.0 / 13.0;
    q = q * s2 + 2.0 / 11.0;
    q = q * s2 + 2.0 / 9.0;
    q = q * s2 + 2.0 / 7.0;
    q = q * s2 + 2.0 / 5.0;
    q = q * s2 + 2.0 / 3.0;
    q = q * s2 + 2.0;
    return c + s * q;
}

}  // namespace detail

// log(2 cosh(h)) = |h| + log1p(exp(-2|h|)), overflow-safe for all h.
inline double log_2cosh(double h) {
    double a = std::abs(h);
    double y = 2.0 * a;
    if (y > 708.0) return a;
    return a + detail::log1p_unit(detail::exp_neg(y));
}

// log(1 + 2 cosh(h)), the three-state normalizer:
// |h| + log1p(t + t^2) with t = exp(-|h|), and t + t^2 <= 2.
inline double log_1p_2cosh(double h) {
    double a = std::abs(h);
    if (a > 708.0) return a;
    double t = detail::exp_neg(a);
    return a + detail::log1p_unit(t + t * t);
}

// Reference versions through libm, used by tests and available as a
// cross-check anywhere bit-for-bit agreement with the batch kernels is not
// required.
inline double log_2cosh_ref(double h) {
    double a = std::abs(h);
    return a + std::log1p(std::exp(-2.0 * a));
}
inline double log_1p_2cosh_ref(double h) {
    double a = std::abs(h);
    double t = std::exp(-a);
    return a + std::log1p(t + t * t);
}

// Batch kernels over per-sample fields. These are the hot loops of every
// likelihood evaluation; keep them free of function calls that block
// vectorization.

inline double sum_log_2cosh(const double* h, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += log_2cosh(h[i]);
    return s;
}

inline double sum_log_2cosh_shift(const double* __restrict h,
                                  const double* __restrict x, double dw,
                                  std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += log_2cosh(h[i] + dw * x[i]);
    return s;
}

inline double sum_log_2cosh_const_shift(const double* h, double c,
                                        std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += log_2cosh(h[i] + c);
    return s;
}

inline double sum_log_1p_2cosh(const double* h, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += log_1p_2cosh(h[i]);
    return s;
}

inline double sum_log_1p_2cosh_shift(const double* __restrict h,
                                     const double* __restrict x, double dw,
                                     std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += log_1p_2cosh(h[i] + dw * x[i]);
    return s;
}

inline double sum_log_1p_2cosh_const_shift(const double* h, double c,
                                           std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += log_1p_2cosh(h[i] + c);
    return s;
}

inline double dot(const double* __restrict a, const double* __restrict b,
                  std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

inline double sum(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

inline double sum_sq(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
    return s;
}

// log(n!) with a table for small n; larger arguments go through lgamma.
double log_factorial(std::int64_t n);

// log((2k)!!) = k log 2 + log(k!) for even arguments; m must be even, >= 0.
double log_double_factorial_even(std::int64_t m);

// log of binomial(n, k); k < 0 or k > n gives -inf. Handles n too large for
// a table through lgamma.
double log_binomial(std::int64_t n, std::int64_t k);

// log of the multiset coefficient ((n, m)) = binomial(n + m - 1, m):
// the number of m-combinations with repetition from n items.
double log_multiset(std::int64_t n, std::int64_t m);

double log_sum_exp(const std::vector<double>& v);

}  // namespace netrecon
