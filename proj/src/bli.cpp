#include "netrecon/bli.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "netrecon/errors.hpp"
#include "netrecon/grid.hpp"
#include "netrecon/math_util.hpp"

namespace netrecon {

namespace {

// points this far below the maximum carry no double-precision mass; using a
// finite floor keeps the interpolation arithmetic clean when the objective
// returns -inf or NaN
constexpr double CLAMP_DROP = 1.0e4;

double sanitize(double y) { return std::isnan(y) ? NEG_INF : y; }

// log((e^u - 1) / u), continuous through u = 0
double log_e1u(double u) {
    if (std::abs(u) < 1e-6) return 0.5 * u + u * u / 24.0;
    if (u > 0.0) return u + std::log1p(-std::exp(-u)) - std::log(u);
    return std::log1p(-std::exp(u)) - std::log(-u);
}

// log of the integral of exp over a segment of length len whose log values
// run from y0 to y1
double log_segment_mass(double len, double y0, double y1) {
    if (!(len > 0.0)) return NEG_INF;
    return y0 + std::log(len) + log_e1u(y1 - y0);
}

// position in [0, len] with density proportional to exp(d * t / len)
double sample_in_segment(double len, double d, double u) {
    if (std::abs(d) < 1e-9) return u * len;
    double t;
    if (d > 500.0)
        t = len * (1.0 + std::log(u) / d);
    else
        t = len * std::log1p(u * std::expm1(d)) / d;
    return std::min(std::max(t, 0.0), len);
}

}  // namespace

BliDensity::BliDensity(const std::function<double(double)>& logf,
                       const BliConfig& cfg) {
    if (!(cfg.init_lo < cfg.init_hi))
        throw std::invalid_argument("bracket: empty initial interval");
    xs_ = {cfg.init_lo, cfg.init_hi};
    ys_ = {sanitize(logf(cfg.init_lo)), sanitize(logf(cfg.init_hi))};

    double ymax = std::max(ys_[0], ys_[1]);
    int grow = 0;
    for (;;) {
        bool need_left = !(ys_.front() <= ymax - cfg.eps_bracket);
        bool need_right = !(ys_.back() <= ymax - cfg.eps_bracket);
        if (!need_left && !need_right) break;
        if (++grow > 2 * cfg.max_expand)
            throw numeric_error(
                "value search: objective does not fall off; check the data "
                "scale and prior settings");
        double width = xs_.back() - xs_.front();
        if (need_left) {
            double x = xs_.front() - width;
            double y = sanitize(logf(x));
            xs_.insert(xs_.begin(), x);
            ys_.insert(ys_.begin(), y);
            ymax = std::max(ymax, y);
        } else {
            double x = xs_.back() + width;
            double y = sanitize(logf(x));
            xs_.push_back(x);
            ys_.push_back(y);
            ymax = std::max(ymax, y);
        }
    }

    for (int round = 0; round < cfg.n_bisect; ++round) {
        std::size_t k = std::max_element(ys_.begin(), ys_.end()) - ys_.begin();
        // the ends sit eps_bracket below the maximum, so k is interior
        // unless the objective was impossible everywhere
        if (k == 0 || k == xs_.size() - 1) break;
        double left_gap = xs_[k] - xs_[k - 1];
        double right_gap = xs_[k + 1] - xs_[k];
        double mid = left_gap >= right_gap ? xs_[k] - 0.5 * left_gap
                                           : xs_[k] + 0.5 * right_gap;
        if (mid == xs_[k] || mid == xs_[k - 1] || mid == xs_[k + 1]) break;
        auto pos = std::lower_bound(xs_.begin(), xs_.end(), mid);
        ys_.insert(ys_.begin() + (pos - xs_.begin()), sanitize(logf(mid)));
        xs_.insert(pos, mid);
    }

    peak_ = static_cast<int>(std::max_element(ys_.begin(), ys_.end()) -
                             ys_.begin());
    double top = ys_[peak_];
    for (double& y : ys_) y = std::max(y, top - CLAMP_DROP);

    std::size_t nseg = xs_.size() - 1;
    seg_mass_.resize(nseg);
    for (std::size_t k = 0; k < nseg; ++k)
        seg_mass_[k] =
            log_segment_mass(xs_[k + 1] - xs_[k], ys_[k], ys_[k + 1]);
    log_z_ = log_sum_exp(seg_mass_);
    if (!std::isfinite(log_z_))
        throw numeric_error("value search: degenerate proposal density");
    std::vector<double> w(nseg);
    for (std::size_t k = 0; k < nseg; ++k)
        w[k] = std::exp(seg_mass_[k] - log_z_);
    alias_.build(w);
}

double BliDensity::sample(Rng& rng) const {
    std::size_t k = alias_.sample(rng);
    double len = xs_[k + 1] - xs_[k];
    double u = rng.uniform();
    return xs_[k] + sample_in_segment(len, ys_[k + 1] - ys_[k],
                                      std::min(1.0 - 1e-16, u));
}

double BliDensity::interp(double w) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), w);
    std::size_t k = it - xs_.begin();  // first point beyond w
    if (k == 0) k = 1;
    if (k == xs_.size()) k = xs_.size() - 1;
    double len = xs_[k] - xs_[k - 1];
    double t = (w - xs_[k - 1]) / len;
    return ys_[k - 1] + t * (ys_[k] - ys_[k - 1]);
}

double BliDensity::log_pdf(double w) const {
    if (w < xs_.front() || w > xs_.back()) return NEG_INF;
    return interp(w) - log_z_;
}

double BliDensity::log_mass_between(double lo, double hi) const {
    double a = std::max(lo, xs_.front());
    double b = std::min(hi, xs_.back());
    if (!(a < b)) return NEG_INF;
    auto first = std::upper_bound(xs_.begin(), xs_.end(), a);
    std::size_t k = (first - xs_.begin());  // segment index k-1 contains a
    double total = NEG_INF;
    double x0 = a, y0 = interp(a);
    while (k < xs_.size()) {
        double x1 = std::min(b, xs_[k]);
        double y1 = x1 == xs_[k] ? ys_[k] : interp(x1);
        double m = log_segment_mass(x1 - x0, y0, y1);
        if (m > NEG_INF)
            total = total > m ? total + std::log1p(std::exp(m - total))
                              : m + std::log1p(std::exp(total - m));
        if (x1 == b) break;
        x0 = x1;
        y0 = y1;
        ++k;
    }
    return total - log_z_;
}

double BliDensity::log_cell_mass(std::int64_t g, double delta) const {
    double c = from_grid(g, delta);
    return log_mass_between(c - 0.5 * delta, c + 0.5 * delta);
}

int BliDensity::voronoi_index(const std::vector<double>& sorted_vals,
                              double w) {
    int n = static_cast<int>(sorted_vals.size());
    if (n == 0) throw std::invalid_argument("voronoi: no candidates");
    // cell i is [mid(i-1, i), mid(i, i+1)), matching the half-open masses
    int i = 0;
    while (i + 1 < n && w >= 0.5 * (sorted_vals[i] + sorted_vals[i + 1])) ++i;
    return i;
}

double BliDensity::log_voronoi_mass(const std::vector<double>& sorted_vals,
                                    int idx) const {
    int n = static_cast<int>(sorted_vals.size());
    if (idx < 0 || idx >= n) throw std::invalid_argument("voronoi: bad index");
    double lo = idx == 0 ? xs_.front()
                         : 0.5 * (sorted_vals[idx - 1] + sorted_vals[idx]);
    double hi = idx == n - 1
                    ? xs_.back()
                    : 0.5 * (sorted_vals[idx] + sorted_vals[idx + 1]);
    return log_mass_between(lo, hi);
}

double bli_optimize(const std::function<double(double)>& logf,
                    const BliConfig& cfg, int rounds) {
    BliConfig c = cfg;
    c.n_bisect = rounds;
    BliDensity d(logf, c);
    return d.peak_x();
}

}  // namespace netrecon
