#pragma once

#include "fracbilin/errors.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace fracbilin {

// Uniform spatial grid of interior nodes: x_i = lo + (i+1) h, i = 0..n-1,
// h = (hi-lo)/(n+1).  The boundary points lo and hi are not nodes; sampled
// functions are extended by zero outside (lo,hi).
struct Grid {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
    double h = 0.0;
    std::vector<double> x;
    // omega_mask[i] = 1 iff x_i lies in the control region; filled by
    // make_grid, empty for a bare Grid::make.
    std::vector<std::uint8_t> omega_mask;

    static Grid make(double lo, double hi, int n_interior) {
        if (!(hi > lo)) throw DomainError("Grid: hi must exceed lo");
        if (n_interior < 1) throw DomainError("Grid: need at least one interior node");
        Grid g;
        g.lo = lo;
        g.hi = hi;
        g.n = n_interior;
        g.h = (hi - lo) / (n_interior + 1);
        g.x.resize(n_interior);
        for (int i = 0; i < n_interior; ++i) g.x[i] = lo + (i + 1) * g.h;
        return g;
    }
};

// Uniform time levels t_k = k dt, k = 0..n_steps, dt = T/n_steps.
struct TimeGrid {
    double T = 0.0;
    int n_steps = 0;
    double dt = 0.0;
    std::vector<double> t;

    static TimeGrid make(double T, int n_steps) {
        if (!(T > 0.0)) throw DomainError("TimeGrid: T must be positive");
        if (n_steps < 1) throw DomainError("TimeGrid: need at least one step");
        TimeGrid tg;
        tg.T = T;
        tg.n_steps = n_steps;
        tg.dt = T / n_steps;
        tg.t.resize(n_steps + 1);
        for (int k = 0; k <= n_steps; ++k) tg.t[k] = k * tg.dt;
        return tg;
    }
};

// Space-time field: row k = values at time level k on the interior nodes,
// so the shape is (n_steps+1) x n_interior.
using Field = Eigen::MatrixXd;

// A Field that additionally satisfies the box constraints on the control
// region and vanishes off it; see project_control.
using ControlField = Field;

// Perturbation direction for the control; same shape, supported on the
// control region.
using DirectionField = Field;

// Costate field; the terminal row is identically zero, the mismatch at the
// final time enters the first backward step instead.
using AdjointField = Field;

inline Field zero_field(const TimeGrid& tg, const Grid& g) {
    return Field::Zero(tg.n_steps + 1, g.n);
}

inline void require_shape(const Field& f, const TimeGrid& tg, const Grid& g, const char* what) {
    if (f.rows() != tg.n_steps + 1 || f.cols() != g.n)
        throw DimensionMismatch(std::string(what) + ": expected " +
                                std::to_string(tg.n_steps + 1) + "x" + std::to_string(g.n) +
                                ", got " + std::to_string(f.rows()) + "x" +
                                std::to_string(f.cols()));
}

} // namespace fracbilin
