#include "netrecon/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "netrecon/errors.hpp"

namespace netrecon {

PosteriorAccumulator::PosteriorAccumulator(int n, double hist_delta)
    : n_(n), hist_delta_(hist_delta), theta_sum_(n, 0.0) {
    if (n < 1) throw std::invalid_argument("accumulator needs n >= 1");
    if (hist_delta < 0.0)
        throw std::invalid_argument("histogram grid spacing must be >= 0");
}

std::uint64_t PosteriorAccumulator::key(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n_ || i == j)
        throw std::invalid_argument("pair outside the accumulator's range");
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
}

void PosteriorAccumulator::add(const WeightedGraphState& g) {
    if (g.size() != n_)
        throw data_error("sample size does not match the accumulator");
    ++s_;
    g.for_each_edge([&](int i, int j, double w) {
        PairStats& st = pairs_[key(i, j)];
        st.presence += 1;
        st.w_sum += w;
        st.w_sq_sum += w * w;
        if (hist_delta_ > 0.0) {
            auto gi = static_cast<std::int64_t>(std::llround(w / hist_delta_));
            auto it = st.hist.find(gi);
            if (it != st.hist.end())
                it->second += 1;
            else if (static_cast<int>(st.hist.size()) < kHistBins)
                st.hist.emplace(gi, 1);
            else
                st.hist_spill += 1;
        }
    });
    for (int i = 0; i < n_; ++i) theta_sum_[i] += g.theta(i);
}

void PosteriorAccumulator::merge(const PosteriorAccumulator& other) {
    if (other.n_ != n_) throw data_error("merging accumulators of unequal size");
    s_ += other.s_;
    for (const auto& [k, st] : other.pairs_) {
        PairStats& mine = pairs_[k];
        mine.presence += st.presence;
        mine.w_sum += st.w_sum;
        mine.w_sq_sum += st.w_sq_sum;
        mine.hist_spill += st.hist_spill;
        for (const auto& [gi, c] : st.hist) {
            auto it = mine.hist.find(gi);
            if (it != mine.hist.end())
                it->second += c;
            else if (static_cast<int>(mine.hist.size()) < kHistBins)
                mine.hist.emplace(gi, c);
            else
                mine.hist_spill += c;
        }
    }
    for (int i = 0; i < n_; ++i) theta_sum_[i] += other.theta_sum_[i];
}

const PosteriorAccumulator::PairStats* PosteriorAccumulator::stats(
    int i, int j) const {
    auto it = pairs_.find(key(i, j));
    return it == pairs_.end() ? nullptr : &it->second;
}

double PosteriorAccumulator::pi(int i, int j) const {
    const PairStats* st = stats(i, j);
    if (!st || s_ == 0) return 0.0;
    return static_cast<double>(st->presence) / static_cast<double>(s_);
}

double PosteriorAccumulator::w_mean(int i, int j, bool conditional) const {
    const PairStats* st = stats(i, j);
    if (!st) return 0.0;
    double denom = conditional ? static_cast<double>(st->presence)
                               : static_cast<double>(s_);
    return denom > 0 ? st->w_sum / denom : 0.0;
}

double PosteriorAccumulator::w_var(int i, int j, bool conditional) const {
    const PairStats* st = stats(i, j);
    if (!st) return 0.0;
    double denom = conditional ? static_cast<double>(st->presence)
                               : static_cast<double>(s_);
    if (denom <= 0) return 0.0;
    double m = st->w_sum / denom;
    return std::max(0.0, st->w_sq_sum / denom - m * m);
}

double PosteriorAccumulator::theta_mean(int i) const {
    if (i < 0 || i >= n_)
        throw std::invalid_argument("node outside the accumulator's range");
    return s_ > 0 ? theta_sum_[i] / static_cast<double>(s_) : 0.0;
}

std::vector<std::pair<int, int>> PosteriorAccumulator::present_pairs() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(pairs_.size());
    for (const auto& [k, st] : pairs_)
        out.emplace_back(static_cast<int>(k >> 32),
                         static_cast<int>(k & 0xffffffffu));
    std::sort(out.begin(), out.end());
    return out;
}

WeightedGraphState mp_estimate(const PosteriorAccumulator& acc,
                               bool conditional_mean) {
    if (acc.n_samples() < 1) throw data_error("estimate from an empty sample");
    WeightedGraphState g(acc.n_nodes());
    for (const auto& [i, j] : acc.present_pairs())
        if (acc.pi(i, j) > 0.5) g.set_entry(i, j, acc.w_mean(i, j, conditional_mean));
    for (int i = 0; i < acc.n_nodes(); ++i) g.set_theta(i, acc.theta_mean(i));
    return g;
}

void write_marginals_tsv(const std::string& path,
                         const PosteriorAccumulator& acc,
                         bool conditional_mean) {
    std::ofstream f(path);
    if (!f) throw data_error("cannot write " + path);
    char buf[128];
    for (const auto& [i, j] : acc.present_pairs()) {
        std::snprintf(buf, sizeof buf, "%d\t%d\t%.17g\t%.17g\t%.17g\n", i, j,
                      acc.pi(i, j), acc.w_mean(i, j, conditional_mean),
                      acc.w_var(i, j, conditional_mean));
        f << buf;
    }
    if (!f.good()) throw data_error("write failed on " + path);
}

std::vector<MarginalRow> read_marginals_tsv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw data_error("cannot read " + path);
    std::vector<MarginalRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        MarginalRow r;
        std::istringstream ss(line);
        if (!(ss >> r.i >> r.j >> r.pi >> r.w_mean >> r.w_var))
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": expected 'i j pi w_mean w_var'");
        rows.push_back(r);
    }
    return rows;
}

Acf autocorrelation(const std::vector<double>& series, int max_lag) {
    auto t = static_cast<std::int64_t>(series.size());
    if (max_lag < 0 || t <= max_lag)
        throw std::invalid_argument("series shorter than requested lag range");
    Acf out;
    out.rho.assign(max_lag + 1, 1.0);
    double mean = 0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(t);
    double c0 = 0;
    for (double v : series) c0 += (v - mean) * (v - mean);
    c0 /= static_cast<double>(t);
    if (!(c0 > 0) || !std::isfinite(c0)) {
        out.degenerate = true;
        return out;
    }
    for (int lag = 1; lag <= max_lag; ++lag) {
        double c = 0;
        for (std::int64_t s = 0; s + lag < t; ++s)
            c += (series[s] - mean) * (series[s + lag] - mean);
        out.rho[lag] = c / static_cast<double>(t) / c0;
    }
    return out;
}

double integrated_autocorr_time(const std::vector<double>& series) {
    auto t = static_cast<std::int64_t>(series.size());
    if (t < 2) return 1.0;
    double mean = 0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(t);
    double c0 = 0;
    for (double v : series) c0 += (v - mean) * (v - mean);
    if (!(c0 > 0) || !std::isfinite(c0)) return 1.0;

    auto rho = [&](std::int64_t lag) {
        double c = 0;
        for (std::int64_t s = 0; s + lag < t; ++s)
            c += (series[s] - mean) * (series[s + lag] - mean);
        return c / c0;
    };

    // pair sums rho(2k) + rho(2k+1) stay positive for the exact ACF of a
    // reversible chain; accumulate until the estimate first dips below zero
    double sum = 0;
    for (std::int64_t k = 0; 2 * k < t - 1; ++k) {
        double even = k == 0 ? 1.0 : rho(2 * k);
        double odd = 2 * k + 1 < t ? rho(2 * k + 1) : 0.0;
        double pair = even + odd;
        if (pair <= 0) break;
        sum += pair;
    }
    return 2.0 * sum - 1.0;
}

std::vector<std::pair<double, double>> cumulative_recall(
    const std::vector<std::pair<int, int>>& candidate,
    const PosteriorAccumulator& acc, const std::vector<double>& thresholds) {
    std::vector<std::pair<int, int>> cand = candidate;
    for (auto& [i, j] : cand)
        if (i > j) std::swap(i, j);
    std::sort(cand.begin(), cand.end());

    std::vector<std::pair<double, double>> out;
    out.reserve(thresholds.size());
    auto pairs = acc.present_pairs();
    for (double thr : thresholds) {
        std::int64_t qualifying = 0, covered = 0;
        for (const auto& [i, j] : pairs) {
            if (acc.pi(i, j) < thr) continue;
            ++qualifying;
            if (std::binary_search(cand.begin(), cand.end(),
                                   std::make_pair(i, j)))
                ++covered;
        }
        double recall = qualifying == 0 ? 1.0
                                        : static_cast<double>(covered) /
                                              static_cast<double>(qualifying);
        out.emplace_back(thr, recall);
    }
    return out;
}

BaselineTable::BaselineTable(int n, int bins)
    : n_(n),
      bins_(bins),
      cov_(static_cast<std::size_t>(n) * n, 0.0),
      pea_(static_cast<std::size_t>(n) * n, 0.0),
      mi_(static_cast<std::size_t>(n) * n, 0.0),
      ent_(n, 0.0),
      def_(static_cast<std::size_t>(n) * n, 0) {}

void BaselineTable::set(int i, int j, double cov, double pearson, bool defined,
                        double mi) {
    cov_[idx(i, j)] = cov_[idx(j, i)] = cov;
    pea_[idx(i, j)] = pea_[idx(j, i)] = pearson;
    def_[idx(i, j)] = def_[idx(j, i)] = defined ? 1 : 0;
    mi_[idx(i, j)] = mi_[idx(j, i)] = mi;
}

namespace {

// symbol streams per node, either the discrete states themselves or
// equal-frequency rank bins
struct Symbolized {
    std::vector<std::vector<int>> sym;  // node -> per-column symbol
    int alphabet = 0;
    int bins = 0;  // 0 when states were used directly
};

Symbolized symbolize(const Dataset& x, int bins) {
    int n = x.n_nodes(), m = x.n_cols();
    std::vector<double> distinct;
    bool discrete = true;
    for (int i = 0; i < n && discrete; ++i)
        for (int c = 0; c < m; ++c) {
            double v = x.x(i, c);
            if (std::find(distinct.begin(), distinct.end(), v) ==
                distinct.end()) {
                distinct.push_back(v);
                if (distinct.size() > 8) {
                    discrete = false;
                    break;
                }
            }
        }

    Symbolized out;
    out.sym.assign(n, std::vector<int>(m));
    if (discrete) {
        std::sort(distinct.begin(), distinct.end());
        out.alphabet = static_cast<int>(distinct.size());
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < m; ++c)
                out.sym[i][c] = static_cast<int>(
                    std::lower_bound(distinct.begin(), distinct.end(),
                                     x.x(i, c)) -
                    distinct.begin());
        return out;
    }

    out.bins = bins;
    out.alphabet = bins;
    std::vector<int> order(m);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < m; ++c) order[c] = c;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return x.x(i, a) < x.x(i, b);
        });
        for (int r = 0; r < m; ++r)
            out.sym[i][order[r]] = static_cast<int>(
                static_cast<std::int64_t>(r) * bins / m);
    }
    return out;
}

}  // namespace

BaselineTable pairwise_baselines(const Dataset& x, int bins) {
    int n = x.n_nodes(), m = x.n_cols();
    if (m < 2) throw data_error("pairwise statistics need at least 2 columns");
    if (bins < 2) throw std::invalid_argument("binning needs bins >= 2");

    Symbolized sy = symbolize(x, bins);
    int k = sy.alphabet;
    BaselineTable t(n, sy.bins);

    std::vector<double> mean(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < m; ++c) mean[i] += x.x(i, c);
        mean[i] /= m;
    }

    // per-node symbol frequencies and entropies
    std::vector<std::vector<double>> freq(n, std::vector<double>(k, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < m; ++c) freq[i][sy.sym[i][c]] += 1.0;
        double h = 0;
        for (double f : freq[i])
            if (f > 0) h -= f / m * std::log(f / m);
        t.set_entropy(i, h);
    }

    // variances first; the off-diagonal pass normalizes against them
    for (int i = 0; i < n; ++i) {
        double var = 0;
        for (int c = 0; c < m; ++c) {
            double d = x.x(i, c) - mean[i];
            var += d * d;
        }
        var /= (m - 1);
        t.set(i, i, var, 1.0, var > 0, t.entropy(i));
    }

    std::vector<double> joint(static_cast<std::size_t>(k) * k);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double cov = 0;
            for (int c = 0; c < m; ++c)
                cov += (x.x(i, c) - mean[i]) * (x.x(j, c) - mean[j]);
            cov /= (m - 1);

            std::fill(joint.begin(), joint.end(), 0.0);
            for (int c = 0; c < m; ++c)
                joint[static_cast<std::size_t>(sy.sym[i][c]) * k +
                      sy.sym[j][c]] += 1.0;
            double mi = 0;
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) {
                    double nab = joint[static_cast<std::size_t>(a) * k + b];
                    if (nab > 0 && freq[i][a] > 0 && freq[j][b] > 0)
                        mi += nab / m *
                              std::log(nab * m / (freq[i][a] * freq[j][b]));
                }
            mi = std::max(0.0, mi);

            double vi = t.cov(i, i), vj = t.cov(j, j);
            bool defined = vi > 0 && vj > 0;
            double pearson = defined ? cov / std::sqrt(vi * vj) : 0.0;
            t.set(i, j, cov, pearson, defined, mi);
        }
    }
    return t;
}

std::int64_t pearson_bound_violations(const BaselineTable& t, double tol) {
    std::int64_t bad = 0;
    int n = t.n();
    for (int x = 0; x < n; ++x)
        for (int z = x + 1; z < n; ++z)
            for (int y = 0; y < n; ++y) {
                if (y == x || y == z) continue;
                if (!t.pearson_defined(x, y) || !t.pearson_defined(y, z) ||
                    !t.pearson_defined(x, z))
                    continue;
                double a = t.pearson(x, y), b = t.pearson(y, z);
                double bound =
                    a * b - std::sqrt(std::max(0.0, 1 - a * a) *
                                      std::max(0.0, 1 - b * b));
                if (t.pearson(x, z) < bound - tol) ++bad;
            }
    return bad;
}

std::int64_t mi_bound_violations(const BaselineTable& t, double tol) {
    std::int64_t bad = 0;
    int n = t.n();
    for (int x = 0; x < n; ++x)
        for (int z = x + 1; z < n; ++z)
            for (int y = 0; y < n; ++y) {
                if (y == x || y == z) continue;
                double bound = t.mi(x, y) + t.mi(y, z) - t.entropy(y);
                if (t.mi(x, z) < bound - tol) ++bad;
            }
    return bad;
}

RankedComparison threshold_reconstruction_compare(
    std::vector<std::tuple<int, int, double>> scores,
    const std::vector<std::pair<int, int>>& reference) {
    for (auto& [i, j, s] : scores) {
        if (i > j) std::swap(i, j);
        if (std::isnan(s)) s = -std::numeric_limits<double>::infinity();
    }
    std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
        if (std::get<2>(a) != std::get<2>(b))
            return std::get<2>(a) > std::get<2>(b);
        return std::make_pair(std::get<0>(a), std::get<1>(a)) <
               std::make_pair(std::get<0>(b), std::get<1>(b));
    });

    std::vector<std::pair<int, int>> ref = reference;
    for (auto& [i, j] : ref)
        if (i > j) std::swap(i, j);
    std::sort(ref.begin(), ref.end());
    ref.erase(std::unique(ref.begin(), ref.end()), ref.end());
    auto r = static_cast<double>(ref.size());

    RankedComparison out;
    out.order.reserve(scores.size());
    std::int64_t inter = 0;
    std::int64_t total = static_cast<std::int64_t>(scores.size());
    for (std::int64_t rank = 0; rank < total; ++rank) {
        auto [i, j, s] = scores[rank];
        out.order.emplace_back(i, j);
        if (std::binary_search(ref.begin(), ref.end(), std::make_pair(i, j)))
            ++inter;
        double k = static_cast<double>(rank + 1);
        double uni = k + r - inter;
        out.fraction.push_back(k / static_cast<double>(total));
        out.jaccard.push_back(uni > 0 ? inter / uni : 1.0);
        out.tpr.push_back(r > 0 ? inter / r : 1.0);
    }
    return out;
}

}  // namespace netrecon
