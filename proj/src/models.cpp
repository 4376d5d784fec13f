#include "netrecon/models.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <unordered_map>

#include "netrecon/errors.hpp"
#include "netrecon/math_util.hpp"

namespace netrecon {

namespace {

// gather the source-state row of a node into contiguous scratch
void gather_src(const Dataset& X, int node, std::vector<double>& out) {
    int m = X.n_samples();
    out.resize(m);
    const double* row = X.row(node);
    if (X.kind() == Dataset::Kind::parallel) {
        for (int k = 0; k < m; ++k) out[k] = row[2 * k];
    } else {
        for (int k = 0; k < m; ++k) out[k] = row[k];
    }
}

// gather the states each likelihood term multiplies the field with:
// successor states for kinetic data, the sample itself for iid data
void gather_outcome(const Dataset& X, int node, std::vector<double>& out) {
    int m = X.n_samples();
    out.resize(m);
    const double* row = X.row(node);
    switch (X.kind()) {
        case Dataset::Kind::iid:
            for (int k = 0; k < m; ++k) out[k] = row[k];
            break;
        case Dataset::Kind::chain:
            for (int k = 0; k < m; ++k) out[k] = row[k + 1];
            break;
        case Dataset::Kind::parallel:
            for (int k = 0; k < m; ++k) out[k] = row[2 * k + 1];
            break;
    }
}

double node_normalizer_sum(ModelKind kind, const double* h, int m) {
    if (kind == ModelKind::zero_ising) return sum_log_1p_2cosh(h, m);
    return sum_log_2cosh(h, m);
}

}  // namespace

void FieldCache::build(const WeightedGraphState& g, const Dataset& X) {
    n_ = g.size();
    mc_ = X.n_samples();
    f_.assign(static_cast<std::size_t>(n_) * mc_, 0.0);
    accepted_ = 0;
    for (int i = 0; i < n_; ++i) {
        double* fi = f_.data() + static_cast<std::size_t>(i) * mc_;
        for (const auto& [j, w] : g.neighbors(i)) {
            const double* xj = X.row(j);
            if (X.kind() == Dataset::Kind::parallel) {
                for (int m = 0; m < mc_; ++m) fi[m] += w * xj[2 * m];
            } else {
                for (int m = 0; m < mc_; ++m) fi[m] += w * xj[m];
            }
        }
    }
}

void FieldCache::bump(const WeightedGraphState& g, const Dataset& X) {
    if (++accepted_ >= resync_interval) {
        std::int64_t interval = resync_interval;
        build(g, X);
        resync_interval = interval;
    }
}

void FieldCache::apply_entry_delta(const WeightedGraphState& g,
                                   const Dataset& X, int i, int j, double dw) {
    double* fi = f_.data() + static_cast<std::size_t>(i) * mc_;
    double* fj = f_.data() + static_cast<std::size_t>(j) * mc_;
    const double* xi = X.row(i);
    const double* xj = X.row(j);
    if (X.kind() == Dataset::Kind::parallel) {
        for (int m = 0; m < mc_; ++m) {
            fi[m] += dw * xj[2 * m];
            fj[m] += dw * xi[2 * m];
        }
    } else {
        for (int m = 0; m < mc_; ++m) {
            fi[m] += dw * xj[m];
            fj[m] += dw * xi[m];
        }
    }
    bump(g, X);
}

void FieldCache::apply_edges_delta(const WeightedGraphState& g,
                                   const Dataset& X,
                                   const std::vector<std::pair<int, int>>& edges,
                                   const std::vector<double>& deltas) {
    for (std::size_t k = 0; k < edges.size(); ++k) {
        auto [i, j] = edges[k];
        double dw = deltas[k];
        double* fi = f_.data() + static_cast<std::size_t>(i) * mc_;
        double* fj = f_.data() + static_cast<std::size_t>(j) * mc_;
        const double* xi = X.row(i);
        const double* xj = X.row(j);
        if (X.kind() == Dataset::Kind::parallel) {
            for (int m = 0; m < mc_; ++m) {
                fi[m] += dw * xj[2 * m];
                fj[m] += dw * xi[2 * m];
            }
        } else {
            for (int m = 0; m < mc_; ++m) {
                fi[m] += dw * xj[m];
                fj[m] += dw * xi[m];
            }
        }
    }
    bump(g, X);
}

void FieldCache::force_sync(const WeightedGraphState& g, const Dataset& X) {
    std::int64_t interval = resync_interval;
    build(g, X);
    resync_interval = interval;
}

double log_likelihood(const Dataset& X, const WeightedGraphState& g,
                      ModelKind kind) {
    X.validate_for(kind);
    if (g.size() != X.n_nodes())
        throw std::invalid_argument("log_likelihood: size mismatch");
    int m = X.n_samples();
    std::vector<double> h(m), y;
    double total = 0.0;
    constexpr double HALF_LOG_2PI = 0.91893853320467274178;
    for (int i = 0; i < g.size(); ++i) {
        std::fill(h.begin(), h.end(), 0.0);
        for (const auto& [j, w] : g.neighbors(i)) {
            const double* xj = X.row(j);
            if (X.kind() == Dataset::Kind::parallel) {
                for (int k = 0; k < m; ++k) h[k] += w * xj[2 * k];
            } else {
                for (int k = 0; k < m; ++k) h[k] += w * xj[k];
            }
        }
        double th = g.theta(i);
        if (kind == ModelKind::gaussian) {
            if (!(th > 0.0))
                throw numeric_error(
                    "gaussian model: node parameter must be positive (node " +
                    std::to_string(i) + ")");
            const double* xi = X.row(i);
            double th2 = th * th;
            double acc = 0.0;
            for (int k = 0; k < m; ++k) {
                double r = xi[k] + th2 * h[k];
                acc += r * r;
            }
            total += -acc / (2.0 * th2) - m * (HALF_LOG_2PI + std::log(th));
        } else {
            gather_outcome(X, i, y);
            double lin = 0.0;
            for (int k = 0; k < m; ++k) {
                h[k] += th;
                lin += y[k] * h[k];
            }
            total += lin - node_normalizer_sum(kind, h.data(), m);
        }
    }
    return total;
}

EntryEval::EntryEval(const Dataset& X, const WeightedGraphState& g,
                     const FieldCache& cache, ModelKind kind, int i, int j,
                     EvalScratch& scratch)
    : kind_(kind), w_old_(g.weight(i, j)), m_(X.n_samples()) {
    if (kind == ModelKind::gaussian) {
        // everything reduces to moments of (x_i, x_j, s_i, s_j)
        gather_src(X, i, scratch.b0);
        gather_src(X, j, scratch.b1);
        const double* xi = scratch.b0.data();
        const double* xj = scratch.b1.data();
        const double* si = cache.row(i);
        const double* sj = cache.row(j);
        a_ = dot(xi, xj, m_);
        bi_ = dot(si, xj, m_);
        bj_ = dot(sj, xi, m_);
        di_ = sum_sq(xi, m_);
        dj_ = sum_sq(xj, m_);
        double ti = g.theta(i), tj = g.theta(j);
        th2_i_ = ti * ti;
        th2_j_ = tj * tj;
        return;
    }
    gather_src(X, i, scratch.b0);
    gather_src(X, j, scratch.b1);
    xi_ = scratch.b0.data();
    xj_ = scratch.b1.data();
    scratch.b2.resize(m_);
    scratch.b3.resize(m_);
    const double* fi = cache.row(i);
    const double* fj = cache.row(j);
    double ti = g.theta(i), tj = g.theta(j);
    for (int k = 0; k < m_; ++k) scratch.b2[k] = fi[k] + ti;
    for (int k = 0; k < m_; ++k) scratch.b3[k] = fj[k] + tj;
    hi_ = scratch.b2.data();
    hj_ = scratch.b3.data();
    base_i_ = node_normalizer_sum(kind_, hi_, m_);
    base_j_ = node_normalizer_sum(kind_, hj_, m_);
    gather_outcome(X, i, scratch.b4);
    gather_outcome(X, j, scratch.b5);
    lin_i_ = dot(scratch.b4.data(), xj_, m_);
    lin_j_ = dot(scratch.b5.data(), xi_, m_);
}

double EntryEval::delta_ll(double w_new) const {
    double dw = w_new - w_old_;
    if (dw == 0.0) return 0.0;
    switch (kind_) {
        case ModelKind::gaussian: {
            double di = -dw * a_ - th2_i_ * (2.0 * dw * bi_ + dw * dw * dj_) * 0.5;
            double dj = -dw * a_ - th2_j_ * (2.0 * dw * bj_ + dw * dw * di_) * 0.5;
            return di + dj;
        }
        case ModelKind::zero_ising:
            return dw * (lin_i_ + lin_j_) -
                   (sum_log_1p_2cosh_shift(hi_, xj_, dw, m_) - base_i_) -
                   (sum_log_1p_2cosh_shift(hj_, xi_, dw, m_) - base_j_);
        default:
            return dw * (lin_i_ + lin_j_) -
                   (sum_log_2cosh_shift(hi_, xj_, dw, m_) - base_i_) -
                   (sum_log_2cosh_shift(hj_, xi_, dw, m_) - base_j_);
    }
}

NodeEval::NodeEval(const Dataset& X, const WeightedGraphState& g,
                   const FieldCache& cache, ModelKind kind, int i,
                   EvalScratch& scratch)
    : kind_(kind), th_old_(g.theta(i)), m_(X.n_samples()) {
    if (kind == ModelKind::gaussian) {
        gather_src(X, i, scratch.b0);
        sxx_ = sum_sq(scratch.b0.data(), m_);
        sss_ = sum_sq(cache.row(i), m_);
        return;
    }
    h_ = cache.row(i);
    base_ = kind == ModelKind::zero_ising
                ? sum_log_1p_2cosh_const_shift(h_, th_old_, m_)
                : sum_log_2cosh_const_shift(h_, th_old_, m_);
    gather_outcome(X, i, scratch.b4);
    lin_ = sum(scratch.b4.data(), m_);
}

double NodeEval::delta_ll(double theta_new) const {
    if (theta_new == th_old_) return 0.0;
    if (kind_ == ModelKind::gaussian) {
        if (!(theta_new > 0.0)) return NEG_INF;
        auto part = [&](double th) {
            return -sxx_ / (2.0 * th * th) - th * th * sss_ * 0.5 -
                   m_ * std::log(th);
        };
        return part(theta_new) - part(th_old_);
    }
    double norm = kind_ == ModelKind::zero_ising
                      ? sum_log_1p_2cosh_const_shift(h_, theta_new, m_)
                      : sum_log_2cosh_const_shift(h_, theta_new, m_);
    return (theta_new - th_old_) * lin_ - (norm - base_);
}

EdgeSetEval::EdgeSetEval(
    const Dataset& X, const WeightedGraphState& g, const FieldCache& cache,
    ModelKind kind, const std::vector<std::pair<int, int>>& moved,
    const std::vector<std::pair<std::pair<int, int>, double>>& pinned)
    : kind_(kind), m_(X.n_samples()) {
    std::unordered_map<int, int> slot;
    auto block_of = [&](int node) -> NodeBlock& {
        auto [it, fresh] = slot.try_emplace(node, static_cast<int>(blocks_.size()));
        if (fresh) {
            blocks_.emplace_back();
            NodeBlock& b = blocks_.back();
            b.node = node;
            b.theta = g.theta(node);
            const double* f = cache.row(node);
            b.hq.assign(f, f + m_);
            if (kind_ != ModelKind::gaussian)
                for (double& v : b.hq) v += b.theta;
            b.p.assign(m_, 0.0);
        }
        return blocks_[it->second];
    };
    std::vector<double> xbuf;
    auto add_partner = [&](int node, int partner, double coef_const,
                           bool count_in_p) {
        NodeBlock& b = block_of(node);
        gather_src(X, partner, xbuf);
        for (int k = 0; k < m_; ++k) b.hq[k] += coef_const * xbuf[k];
        if (count_in_p)
            for (int k = 0; k < m_; ++k) b.p[k] += xbuf[k];
    };
    for (const auto& [i, j] : moved) {
        double w_cur = g.weight(i, j);
        add_partner(i, j, -w_cur, true);
        add_partner(j, i, -w_cur, true);
    }
    for (const auto& [edge, w_tgt] : pinned) {
        auto [i, j] = edge;
        double shift = w_tgt - g.weight(i, j);
        add_partner(i, j, shift, false);
        add_partner(j, i, shift, false);
    }
    std::vector<double> ybuf;
    for (NodeBlock& b : blocks_) {
        const double* f = cache.row(b.node);
        if (kind_ == ModelKind::gaussian) {
            gather_src(X, b.node, xbuf);
            const double* x = xbuf.data();
            const double* sq = b.hq.data();
            const double* p = b.p.data();
            double th2 = b.theta * b.theta;
            double c_xsq = dot(x, sq, m_), c_xp = dot(x, p, m_);
            double c_xs0 = dot(x, f, m_);
            double sq2 = sum_sq(sq, m_), s02 = sum_sq(f, m_);
            double sqp = dot(sq, p, m_), p2 = sum_sq(p, m_);
            b.g_c0 = -(c_xsq - c_xs0) - th2 * (sq2 - s02) * 0.5;
            b.g_c1 = -c_xp - th2 * sqp;
            b.g_c2 = -th2 * p2 * 0.5;
            b.hq.clear();
            b.p.clear();
        } else {
            gather_outcome(X, b.node, ybuf);
            const double* y = ybuf.data();
            b.lin_c = dot(y, b.hq.data(), m_);
            b.lin_w = dot(y, b.p.data(), m_);
            std::vector<double> h0(m_);
            for (int k = 0; k < m_; ++k) h0[k] = f[k] + b.theta;
            b.base = dot(y, h0.data(), m_) -
                     node_normalizer_sum(kind_, h0.data(), m_);
        }
    }
}

double EdgeSetEval::delta_ll(double w_new) const {
    double total = 0.0;
    for (const NodeBlock& b : blocks_) {
        if (kind_ == ModelKind::gaussian) {
            total += b.g_c0 + w_new * b.g_c1 + w_new * w_new * b.g_c2;
        } else {
            double norm =
                kind_ == ModelKind::zero_ising
                    ? sum_log_1p_2cosh_shift(b.hq.data(), b.p.data(), w_new, m_)
                    : sum_log_2cosh_shift(b.hq.data(), b.p.data(), w_new, m_);
            total += (b.lin_c + w_new * b.lin_w - norm) - b.base;
        }
    }
    return total;
}

Dataset simulate_kinetic_ising(const WeightedGraphState& g, int n_samples,
                               Dataset::Kind kind, Rng& rng) {
    if (kind == Dataset::Kind::iid)
        throw std::invalid_argument(
            "simulate_kinetic_ising: kind must be chain or parallel");
    if (n_samples <= 0)
        throw std::invalid_argument("simulate_kinetic_ising: no samples");
    int n = g.size();
    int cols = kind == Dataset::Kind::chain ? n_samples + 1 : 2 * n_samples;
    Dataset ds(kind, n, cols);
    ds.set_model_tag(to_string(ModelKind::kinetic_ising));
    auto step = [&](int src, int dst) {
        for (int i = 0; i < n; ++i) {
            double h = g.theta(i);
            for (const auto& [j, w] : g.neighbors(i)) h += w * ds.x(j, src);
            // P(x' = +1 | h) = e^h / (2 cosh h)
            double p = 1.0 / (1.0 + std::exp(-2.0 * h));
            ds.x(i, dst) = rng.uniform() < p ? 1.0 : -1.0;
        }
    };
    if (kind == Dataset::Kind::chain) {
        for (int i = 0; i < n; ++i) ds.x(i, 0) = rng.coin(0.5) ? 1.0 : -1.0;
        for (int t = 0; t < n_samples; ++t) step(t, t + 1);
    } else {
        for (int m = 0; m < n_samples; ++m) {
            for (int i = 0; i < n; ++i)
                ds.x(i, 2 * m) = rng.coin(0.5) ? 1.0 : -1.0;
            step(2 * m, 2 * m + 1);
        }
    }
    return ds;
}

Dataset simulate_gaussian(const WeightedGraphState& g, int n_samples,
                          Rng& rng) {
    if (n_samples <= 0)
        throw std::invalid_argument("simulate_gaussian: no samples");
    int n = g.size();
    Eigen::MatrixXd prec = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double th = g.theta(i);
        if (!(th > 0.0))
            throw numeric_error(
                "simulate_gaussian: node parameters must be positive");
        prec(i, i) = 1.0 / (th * th);
        for (const auto& [j, w] : g.neighbors(i)) prec(i, j) = w;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(prec);
    if (llt.info() != Eigen::Success)
        throw numeric_error(
            "simulate_gaussian: precision matrix is not positive definite");
    Dataset ds(Dataset::Kind::iid, n, n_samples);
    ds.set_model_tag(to_string(ModelKind::gaussian));
    Eigen::VectorXd z(n);
    for (int c = 0; c < n_samples; ++c) {
        for (int i = 0; i < n; ++i) z(i) = rng.normal();
        Eigen::VectorXd x = llt.matrixU().solve(z);
        for (int i = 0; i < n; ++i) ds.x(i, c) = x(i);
    }
    return ds;
}

}  // namespace netrecon
