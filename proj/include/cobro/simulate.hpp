#pragma once

#include <cstdint>
#include <vector>

#include "cobro/ctmc.hpp"
#include "cobro/rng.hpp"

namespace cobro {

// Discrete monitoring grid 0 = t_0 < t_1 < ... < t_n.
struct TimeGrid {
    std::vector<double> points;

    int n_steps() const { return static_cast<int>(points.size()) - 1; }
    double horizon() const { return points.back(); }
    void validate() const;

    static TimeGrid uniform(double horizon, int n_steps);
};

// One simulated trajectory of the correlated pair (B, W) and its
// decomposition drivers on the grid.  All vectors have n_steps()+1 entries
// except rho, which holds the per-interval correlation (n_steps() entries).
// Invariants: b = x + y, w = x - y, t_clock + s_clock = t at every grid point.
struct PathBundle {
    TimeGrid grid;
    std::vector<double> b, w;             // the correlated Brownian pair
    std::vector<double> x, y;             // independent drivers at their clocks
    std::vector<double> t_clock, s_clock; // common / idiosyncratic clocks
    std::vector<double> rho;              // correlation applied on each interval
    uint64_t normal_draws = 0;
    uint64_t uniform_draws = 0;
};

// Terminal-value-only sample of (B_t, W_t).
struct EndpointSample {
    double t = 0.0;
    double b = 0.0, w = 0.0;
    double t_clock = 0.0, s_clock = 0.0;
    uint64_t normal_draws = 0;
    uint64_t uniform_draws = 0;
};

// Common-decomposition path scheme: simulate the regime chain exactly,
// integrate the clock exactly on every cell, then draw the X/Y increments
// from their true Gaussian law.  Distribution of (B,W) at grid points is
// exact.  Cost: 2n normals plus 2 + 2*jumps uniforms (initial state, one
// per holding time including the final truncated one, one per jump target).
PathBundle simulate_cd_path(const RegimeConfig& cfg, const TimeGrid& grid, RngStream& rng);

// Common-decomposition endpoint scheme: skeleton chain on a uniform grid via
// the one-step transition matrix, left-endpoint clock increments, then a
// single Gaussian pair (B_t, W_t) | T_t.  Cost: exactly n uniforms + 2
// normals = n + 2 draws.
EndpointSample simulate_cd_endpoint(const RegimeConfig& cfg, double t, int n_steps,
                                    RngStream& rng);

// Euler-type benchmark: skeleton chain plus the classical two-normal
// correlated increment on every cell.  Cost: n uniforms + 2n normals = 3n.
PathBundle simulate_euler_path(const RegimeConfig& cfg, const TimeGrid& grid,
                               RngStream& rng);

// Quadratic-covariation estimator of the average correlation over the whole
// path: sum(db * dw) / horizon.
double estimate_rho_hat(const PathBundle& path);

// Realized covariance of the two log-price drivers up to grid time t:
// sigma1*sigma2*(2*T_t - t).
double realized_covariance(double sigma1, double sigma2, const PathBundle& path, double t);

// Path-average correlation up to grid time t: (2*T_t - t)/t.
double average_rho(const PathBundle& path, double t);

} // namespace cobro
