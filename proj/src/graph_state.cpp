#include "netrecon/graph_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "netrecon/errors.hpp"

namespace netrecon {

WeightedGraphState::WeightedGraphState(int n, double theta0) : n_(n) {
    if (n <= 0)
        throw std::invalid_argument("WeightedGraphState: size must be positive");
    theta_.assign(n_, theta0);
    adj_.resize(n_);
}

int WeightedGraphState::check_node(int i) const {
    if (i < 0 || i >= n_)
        throw std::invalid_argument("graph: node index out of range");
    return i;
}

void WeightedGraphState::check_pair(int i, int j) const {
    check_node(i);
    check_node(j);
    if (i == j)
        throw std::invalid_argument("graph: diagonal entries are not stored");
}

namespace {
// position of j in a sorted (neighbor, weight) list
template <typename List>
auto find_nbr(List& lst, int j) {
    return std::lower_bound(
        lst.begin(), lst.end(), j,
        [](const std::pair<int, double>& e, int key) { return e.first < key; });
}
}  // namespace

double WeightedGraphState::weight(int i, int j) const {
    check_pair(i, j);
    const auto& lst = adj_[i];
    auto it = find_nbr(lst, j);
    if (it != lst.end() && it->first == j) return it->second;
    return 0.0;
}

double WeightedGraphState::set_entry(int i, int j, double w) {
    check_pair(i, j);
    double prev = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        int a = pass == 0 ? i : j;
        int b = pass == 0 ? j : i;
        auto& lst = adj_[a];
        auto it = find_nbr(lst, b);
        bool present = it != lst.end() && it->first == b;
        if (present) prev = it->second;
        if (w == 0.0) {
            if (present) lst.erase(it);
        } else if (present) {
            it->second = w;
        } else {
            lst.insert(it, {b, w});
        }
    }
    if (w == 0.0 && prev != 0.0) --m_edges_;
    if (w != 0.0 && prev == 0.0) ++m_edges_;
    return prev;
}

std::vector<std::pair<int, int>> WeightedGraphState::edge_pairs() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(m_edges_));
    for_each_edge([&](int i, int j, double) { out.emplace_back(i, j); });
    return out;
}

const std::vector<int>& BfsScratch::reachable_set(
    const WeightedGraphState& g, int start, int d,
    std::optional<std::pair<int, int>> override_pair, bool override_present) {
    if (start < 0 || start >= g.size())
        throw std::invalid_argument("reachable_set: start out of range");
    if (d < 1) throw std::invalid_argument("reachable_set: depth must be >= 1");
    if (mark_.size() < static_cast<std::size_t>(g.size()))
        mark_.assign(g.size(), 0);
    if (++stamp_ == 0) {
        std::fill(mark_.begin(), mark_.end(), 0);
        stamp_ = 1;
    }
    last_start_ = start;
    out_.clear();
    queue_.clear();
    mark_[start] = stamp_;
    queue_.push_back(start);
    std::size_t head = 0;
    int frontier_end = 1;
    int ov_a = -1, ov_b = -1;
    if (override_pair) {
        ov_a = override_pair->first;
        ov_b = override_pair->second;
    }
    auto visit = [&](int nxt) {
        if (mark_[nxt] != stamp_) {
            mark_[nxt] = stamp_;
            queue_.push_back(nxt);
            out_.push_back(nxt);
        }
    };
    for (int depth = 0; depth < d; ++depth) {
        for (std::size_t q = head; q < static_cast<std::size_t>(frontier_end);
             ++q) {
            int u = queue_[q];
            for (const auto& [v, w] : g.neighbors(u)) {
                (void)w;
                bool skip = !override_present &&
                            ((u == ov_a && v == ov_b) || (u == ov_b && v == ov_a));
                if (!skip) visit(v);
            }
            if (override_present) {
                if (u == ov_a && g.weight(ov_a, ov_b) == 0.0) visit(ov_b);
                if (u == ov_b && g.weight(ov_a, ov_b) == 0.0) visit(ov_a);
            }
        }
        head = frontier_end;
        frontier_end = static_cast<int>(queue_.size());
        if (head == static_cast<std::size_t>(frontier_end)) break;
    }
    return out_;
}

double jaccard_similarity(const WeightedGraphState& a,
                          const WeightedGraphState& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("jaccard_similarity: size mismatch");
    double num = 0.0, den = 0.0;
    a.for_each_edge([&](int i, int j, double wa) {
        double wb = b.weight(i, j);
        num += std::abs(wa - wb);
        den += std::abs(wa + wb);
    });
    b.for_each_edge([&](int i, int j, double wb) {
        if (a.weight(i, j) == 0.0) {
            num += std::abs(wb);
            den += std::abs(wb);
        }
    });
    if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return 1.0 - num / den;
}

double jaccard_edges(const std::vector<std::pair<int, int>>& a,
                     const std::vector<std::pair<int, int>>& b) {
    // both inputs sorted ascending (i, j); intersect by merge
    std::size_t ia = 0, ib = 0, inter = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] == b[ib]) {
            ++inter;
            ++ia;
            ++ib;
        } else if (a[ia] < b[ib]) {
            ++ia;
        } else {
            ++ib;
        }
    }
    std::size_t uni = a.size() + b.size() - inter;
    if (uni == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(inter) / static_cast<double>(uni);
}

void write_edge_list(const std::string& path, const WeightedGraphState& g) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open for writing: " + path);
    char buf[96];
    g.for_each_edge([&](int i, int j, double w) {
        std::snprintf(buf, sizeof buf, "%d\t%d\t%.17g\n", i, j, w);
        out << buf;
    });
    if (!out) throw data_error("write failed: " + path);
}

void read_edge_list(const std::string& path, WeightedGraphState& g) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        long long i, j;
        double w;
        if (!(ss >> i >> j >> w))
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": expected 'i j w'");
        if (i < 0 || j < 0 || i >= g.size() || j >= g.size())
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": node index out of range");
        if (i == j)
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": self loops are not allowed");
        if (g.weight(static_cast<int>(i), static_cast<int>(j)) != 0.0)
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": duplicate pair");
        if (w == 0.0)
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": zero weight in edge list");
        g.set_entry(static_cast<int>(i), static_cast<int>(j), w);
    }
}

void write_node_params(const std::string& path, const WeightedGraphState& g) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open for writing: " + path);
    char buf[64];
    for (int i = 0; i < g.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%d\t%.17g\n", i, g.theta(i));
        out << buf;
    }
    if (!out) throw data_error("write failed: " + path);
}

void read_node_params(const std::string& path, WeightedGraphState& g) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        long long i;
        double v;
        if (!(ss >> i >> v))
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": expected 'i theta'");
        if (i < 0 || i >= g.size())
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": node index out of range");
        g.set_theta(static_cast<int>(i), v);
    }
}

}  // namespace netrecon
