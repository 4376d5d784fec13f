#include "netrecon/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "netrecon/errors.hpp"

namespace netrecon {

ModelKind model_kind_from_string(const std::string& tag) {
    if (tag == "kinetic-ising") return ModelKind::kinetic_ising;
    if (tag == "equilibrium-ising") return ModelKind::equilibrium_ising;
    if (tag == "zero-ising") return ModelKind::zero_ising;
    if (tag == "gaussian") return ModelKind::gaussian;
    throw config_error("unknown model '" + tag +
                       "' (expected kinetic-ising, equilibrium-ising, "
                       "zero-ising or gaussian)");
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::kinetic_ising: return "kinetic-ising";
        case ModelKind::equilibrium_ising: return "equilibrium-ising";
        case ModelKind::zero_ising: return "zero-ising";
        case ModelKind::gaussian: return "gaussian";
    }
    return "?";
}

bool model_is_iid(ModelKind kind) { return kind != ModelKind::kinetic_ising; }

Dataset::Dataset(Kind kind, int n, int cols)
    : kind_(kind), n_(n), cols_(cols) {
    if (n <= 0) throw std::invalid_argument("Dataset: n_nodes must be positive");
    if (cols <= 0) throw std::invalid_argument("Dataset: no columns");
    if (kind == Kind::chain && cols < 2)
        throw std::invalid_argument("Dataset: chain data needs >= 2 columns");
    if (kind == Kind::parallel && cols % 2 != 0)
        throw std::invalid_argument("Dataset: parallel data needs column pairs");
    v_.assign(static_cast<std::size_t>(n) * cols, 0.0);
}

int Dataset::n_samples() const {
    switch (kind_) {
        case Kind::iid: return cols_;
        case Kind::chain: return cols_ - 1;
        case Kind::parallel: return cols_ / 2;
    }
    return 0;
}

int Dataset::src_col(int m) const {
    switch (kind_) {
        case Kind::iid: return m;
        case Kind::chain: return m;
        case Kind::parallel: return 2 * m;
    }
    return 0;
}

int Dataset::tgt_col(int m) const {
    switch (kind_) {
        case Kind::iid:
            throw std::invalid_argument("Dataset: iid data has no targets");
        case Kind::chain: return m + 1;
        case Kind::parallel: return 2 * m + 1;
    }
    return 0;
}

void Dataset::validate_for(ModelKind kind) const {
    bool want_markov = (kind == ModelKind::kinetic_ising);
    bool is_markov = (kind_ != Kind::iid);
    if (want_markov != is_markov)
        throw data_error(want_markov
                             ? "model requires transition data (kind=markov)"
                             : "model requires independent samples (kind=iid)");
    for (int i = 0; i < n_; ++i) {
        for (int c = 0; c < cols_; ++c) {
            double s = x(i, c);
            bool ok;
            switch (kind) {
                case ModelKind::kinetic_ising:
                case ModelKind::equilibrium_ising:
                    ok = (s == 1.0 || s == -1.0);
                    break;
                case ModelKind::zero_ising:
                    ok = (s == 1.0 || s == -1.0 || s == 0.0);
                    break;
                case ModelKind::gaussian:
                    ok = std::isfinite(s);
                    break;
                default:
                    ok = false;
            }
            if (!ok)
                throw data_error("dataset value " + std::to_string(s) +
                                 " at node " + std::to_string(i) + ", column " +
                                 std::to_string(c) + " is invalid for model " +
                                 to_string(kind));
        }
    }
}

Dataset::Kind Dataset::kind_from_string(const std::string& s) {
    if (s == "iid") return Kind::iid;
    if (s == "markov") return Kind::chain;
    if (s == "markov-parallel") return Kind::parallel;
    throw data_error("unknown dataset kind '" + s + "'");
}

std::string Dataset::kind_to_string(Kind k) {
    switch (k) {
        case Kind::iid: return "iid";
        case Kind::chain: return "markov";
        case Kind::parallel: return "markov-parallel";
    }
    return "?";
}

// Format: a single header line
//   # N=<nodes> M=<samples> kind=<iid|markov|markov-parallel> model=<tag>
// followed by one comma-separated row of N values per stored sample. Markov
// chains write x_0 first, then the M successor states; markov-parallel data
// writes 2M rows alternating source and target.
void Dataset::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << "# N=" << n_ << " M=" << n_samples()
        << " kind=" << kind_to_string(kind_) << " model=" << model_tag_ << "\n";
    char buf[40];
    for (int c = 0; c < cols_; ++c) {
        for (int i = 0; i < n_; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", x(i, c));
            out << buf << (i + 1 < n_ ? "," : "\n");
        }
    }
    if (!out) throw data_error("write failed: " + path);
}

Dataset Dataset::read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open: " + path);
    std::string header;
    if (!std::getline(in, header) || header.empty() || header[0] != '#')
        throw data_error(path + ": missing '# N=... M=... kind=... model=...' header");
    int n = -1, m = -1;
    std::string kind_s, model_s;
    {
        std::istringstream ss(header.substr(1));
        std::string tok;
        while (ss >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "N") n = std::stoi(val);
            else if (key == "M") m = std::stoi(val);
            else if (key == "kind") kind_s = val;
            else if (key == "model") model_s = val;
        }
    }
    if (n <= 0 || m <= 0 || kind_s.empty())
        throw data_error(path + ": header must define N, M and kind");
    Kind kind = kind_from_string(kind_s);
    int cols = kind == Kind::iid ? m : (kind == Kind::chain ? m + 1 : 2 * m);
    Dataset ds(kind, n, cols);
    ds.model_tag_ = model_s;
    std::string line;
    int c = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (c >= cols)
            throw data_error(path + ": more rows than the header announces");
        std::istringstream ss(line);
        std::string cell;
        for (int i = 0; i < n; ++i) {
            if (!std::getline(ss, cell, ','))
                throw data_error(path + ":" + std::to_string(lineno) +
                                 ": expected " + std::to_string(n) + " values");
            try {
                ds.x(i, c) = std::stod(cell);
            } catch (const std::exception&) {
                throw data_error(path + ":" + std::to_string(lineno) +
                                 ": bad number '" + cell + "'");
            }
        }
        if (std::getline(ss, cell, ','))
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": more than " + std::to_string(n) + " values");
        ++c;
    }
    if (c != cols)
        throw data_error(path + ": expected " + std::to_string(cols) +
                         " rows, found " + std::to_string(c));
    return ds;
}

}  // namespace netrecon
