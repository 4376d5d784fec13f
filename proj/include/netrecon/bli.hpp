#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "netrecon/alias.hpp"
#include "netrecon/rng.hpp"

namespace netrecon {

// Controls the bracket-and-bisect search below. The initial interval is a
// fixed configuration constant on purpose: the search must depend on the
// objective only through comparisons of its values, never on the current
// state of the entry being updated, so that forward and reverse proposal
// densities are built from the identical point set.
struct BliConfig {
    double init_lo = -1.0;
    double init_hi = 1.0;
    double eps_bracket = 40.0;  // required log drop at both ends; exp(-40)
                                // of the mass is below double resolution
    int max_expand = 60;        // doublings per side before giving up
    int n_bisect = 4;           // refinement evaluations near the peak
};

// One-dimensional proposal density fitted to a log objective: the interval
// ends are pushed outward (doubling) until the objective has fallen
// eps_bracket below its running maximum on both sides, the peak is refined
// by bisecting the wider interval next to the best point, and the density
// is the normalized exponential of the piecewise-linear interpolation
// through every point visited. Mass outside the visited range is dropped;
// by construction it is at most ~exp(-eps_bracket) of the total.
class BliDensity {
  public:
    BliDensity(const std::function<double(double)>& logf,
               const BliConfig& cfg);

    double sample(Rng& rng) const;
    double log_pdf(double w) const;
    double log_mass_between(double lo, double hi) const;

    // mass of the grid cell that snaps to integer g
    double log_cell_mass(std::int64_t g, double delta) const;

    // mass of the region snapping to sorted_vals[idx]; boundaries are the
    // midpoints between neighboring candidates, half-open to the right
    double log_voronoi_mass(const std::vector<double>& sorted_vals,
                            int idx) const;
    static int voronoi_index(const std::vector<double>& sorted_vals, double w);

    double peak_x() const { return xs_[peak_]; }
    double peak_y() const { return ys_[peak_]; }
    double support_lo() const { return xs_.front(); }
    double support_hi() const { return xs_.back(); }
    int n_evals() const { return static_cast<int>(xs_.size()); }

  private:
    double interp(double w) const;  // sanitized log objective
    std::vector<double> xs_, ys_;   // visited points, ascending
    std::vector<double> seg_mass_;  // log mass per segment
    double log_z_ = 0.0;
    int peak_ = 0;
    AliasTable alias_;
};

// Deterministic peak refinement with the same machinery; used by the greedy
// search. Returns the best point visited after `rounds` bisections.
double bli_optimize(const std::function<double(double)>& logf,
                    const BliConfig& cfg, int rounds);

}  // namespace netrecon
