#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace netrecon {

// Weights and node parameters live on a uniform grid with spacing `delta`.
// States store the double value g * delta together with the integer g, and
// all category bookkeeping is exact integer arithmetic on g.

constexpr double GRID_MAX_ABS_INDEX = 9.0e15;  // stay well inside exact-double ints

inline std::int64_t to_grid(double value, double delta) {
    double g = value / delta;
    if (!(std::abs(g) <= GRID_MAX_ABS_INDEX))
        throw std::domain_error("to_grid: value outside representable grid");
    return std::llround(g);
}

inline double from_grid(std::int64_t g, double delta) {
    return static_cast<double>(g) * delta;
}

inline double snap_to_grid(double value, double delta) {
    return from_grid(to_grid(value, delta), delta);
}

}  // namespace netrecon
