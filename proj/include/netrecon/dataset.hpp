#pragma once

#include <string>
#include <vector>

namespace netrecon {

enum class ModelKind { kinetic_ising, equilibrium_ising, zero_ising, gaussian };

ModelKind model_kind_from_string(const std::string& tag);
std::string to_string(ModelKind kind);

// whether samples are independent columns (true) or Markov transitions
bool model_is_iid(ModelKind kind);

// Observed node states. Values are stored node-major: x(i, c) is node i in
// stored column c. Markov data distinguishes stored columns from
// transitions; `chain` stores M+1 columns for M transitions, `parallel`
// stores 2M columns as (source, target) pairs of independent transitions.
class Dataset {
  public:
    enum class Kind { iid, chain, parallel };

    Dataset(Kind kind, int n, int cols);

    Kind kind() const { return kind_; }
    int n_nodes() const { return n_; }
    int n_cols() const { return cols_; }

    // number of likelihood terms: columns for iid data, transitions otherwise
    int n_samples() const;

    int src_col(int m) const;
    int tgt_col(int m) const;

    double x(int i, int c) const { return v_[static_cast<std::size_t>(i) * cols_ + c]; }
    double& x(int i, int c) { return v_[static_cast<std::size_t>(i) * cols_ + c]; }
    const double* row(int i) const { return v_.data() + static_cast<std::size_t>(i) * cols_; }

    const std::string& model_tag() const { return model_tag_; }
    void set_model_tag(const std::string& tag) { model_tag_ = tag; }

    // throws data_error if values are outside the model's state space
    void validate_for(ModelKind kind) const;

    static Dataset read_csv(const std::string& path);
    void write_csv(const std::string& path) const;

    static Kind kind_from_string(const std::string& s);
    static std::string kind_to_string(Kind k);

  private:
    Kind kind_;
    int n_;
    int cols_;
    std::vector<double> v_;
    std::string model_tag_;
};

}  // namespace netrecon
