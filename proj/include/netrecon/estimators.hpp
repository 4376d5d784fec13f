#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "graph_state.hpp"

namespace netrecon {

// Streaming sums over posterior samples: per-pair presence counts and weight
// moments plus per-node parameter sums. Accumulators from independent chains
// merge by plain addition, so multi-chain estimates come out the same no
// matter how the chains were scheduled.
class PosteriorAccumulator {
  public:
    struct PairStats {
        std::int64_t presence = 0;
        double w_sum = 0, w_sq_sum = 0;
        // weight histogram on the value grid, capped at kHistBins distinct
        // values; whatever falls outside the cap is counted, not binned
        std::map<std::int64_t, std::int64_t> hist;
        std::int64_t hist_spill = 0;
    };

    static constexpr int kHistBins = 64;

    // hist_delta > 0 turns on per-pair weight histograms on that grid
    explicit PosteriorAccumulator(int n, double hist_delta = 0.0);

    void add(const WeightedGraphState& g);
    void merge(const PosteriorAccumulator& other);

    int n_nodes() const { return n_; }
    std::int64_t n_samples() const { return s_; }

    // marginal probability that the pair is nonzero
    double pi(int i, int j) const;

    // posterior mean weight, over all samples by default (absent counts as
    // zero); conditional restricts to the samples where the pair is present
    double w_mean(int i, int j, bool conditional = false) const;
    double w_var(int i, int j, bool conditional = false) const;
    double theta_mean(int i) const;

    // null when the pair was never present
    const PairStats* stats(int i, int j) const;

    // pairs with presence > 0, ascending
    std::vector<std::pair<int, int>> present_pairs() const;

  private:
    std::uint64_t key(int i, int j) const;

    int n_;
    double hist_delta_;
    std::int64_t s_ = 0;
    std::unordered_map<std::uint64_t, PairStats> pairs_;
    std::vector<double> theta_sum_;
};

// Marginal-posterior point estimate: keep a pair when its presence
// probability strictly exceeds 1/2, valued at the posterior mean weight;
// node parameters are posterior means.
WeightedGraphState mp_estimate(const PosteriorAccumulator& acc,
                               bool conditional_mean = false);

// One row per pair with presence > 0: "i<TAB>j<TAB>pi<TAB>w_mean<TAB>w_var"
// with 17 significant digits.
void write_marginals_tsv(const std::string& path,
                         const PosteriorAccumulator& acc,
                         bool conditional_mean = false);
struct MarginalRow {
    int i = 0, j = 0;
    double pi = 0, w_mean = 0, w_var = 0;
};
std::vector<MarginalRow> read_marginals_tsv(const std::string& path);

// Normalized autocorrelation at lags 0..max_lag. A series with no variance
// has no scale to normalize by; it is flagged and rho is 1 everywhere by
// convention.
struct Acf {
    std::vector<double> rho;
    bool degenerate = false;
};
Acf autocorrelation(const std::vector<double>& series, int max_lag);

// Integrated autocorrelation time 1 + 2 sum_t rho(t), with the sum
// truncated by the initial-positive-sequence rule: adjacent lag pairs are
// added while their sums stay positive. A degenerate series gives 1.
double integrated_autocorr_time(const std::vector<double>& series);

// For each threshold: of the pairs whose marginal probability reaches it,
// the fraction the candidate set contains. No qualifying pairs means there
// is nothing to miss, so recall is 1.
std::vector<std::pair<double, double>> cumulative_recall(
    const std::vector<std::pair<int, int>>& candidate,
    const PosteriorAccumulator& acc, const std::vector<double>& thresholds);

// Pairwise correlation heuristics over the raw node series: covariance,
// Pearson correlation, and plug-in mutual information in nats. Data whose
// values form a small discrete alphabet keeps its states; anything else is
// ranked into equal-frequency bins per node. Zero-variance nodes have no
// defined correlation and are flagged.
class BaselineTable {
  public:
    BaselineTable(int n, int bins);

    int n() const { return n_; }
    int bins() const { return bins_; }  // 0 when states were used directly

    double cov(int i, int j) const { return cov_[idx(i, j)]; }
    double pearson(int i, int j) const { return pea_[idx(i, j)]; }
    double mi(int i, int j) const { return mi_[idx(i, j)]; }
    bool pearson_defined(int i, int j) const { return def_[idx(i, j)] != 0; }
    double entropy(int i) const { return ent_[i]; }

    void set(int i, int j, double cov, double pearson, bool defined,
             double mi);
    void set_entropy(int i, double h) { ent_[i] = h; }

  private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * n_ + j;
    }
    int n_, bins_;
    std::vector<double> cov_, pea_, mi_, ent_;
    std::vector<char> def_;
};
BaselineTable pairwise_baselines(const Dataset& x, int bins = 16);

// Triples that violate the Pearson triangle bound
//   corr(x,z) >= corr(x,y) corr(y,z) - sqrt((1-corr(x,y)^2)(1-corr(y,z)^2))
// beyond tol. Exact for correlations computed from one common dataset, so
// any violation indicates a computation bug.
std::int64_t pearson_bound_violations(const BaselineTable& t,
                                      double tol = 1e-9);
// Same for MI(x,z) >= MI(x,y) + MI(y,z) - H(y).
std::int64_t mi_bound_violations(const BaselineTable& t, double tol = 1e-9);

// Threshold sweep of a score ranking against a reference edge set: for each
// prefix of the pairs in descending score order, the binary Jaccard
// similarity and true-positive rate of "top k pairs" as a reconstruction.
struct RankedComparison {
    std::vector<std::pair<int, int>> order;  // pairs by descending score
    std::vector<double> fraction, jaccard, tpr;
};
RankedComparison threshold_reconstruction_compare(
    std::vector<std::tuple<int, int, double>> scores,
    const std::vector<std::pair<int, int>>& reference);

}  // namespace netrecon
