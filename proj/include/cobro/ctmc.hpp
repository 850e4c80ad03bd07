#pragma once

#include <vector>

#include "cobro/linalg.hpp"
#include "cobro/rng.hpp"

namespace cobro {

// Generator of a continuous-time Markov chain on states {0,..,n-1}:
// row-major rate matrix, rows sum to zero, off-diagonal entries >= 0.
struct Generator {
    int n = 0;
    std::vector<double> a; // n*n row-major

    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }

    void validate() const; // throws config_error on contract violation
};

// Regime model: a chain with generator `gen`, initial distribution q0 and
// per-state clock loadings alpha in (0,1).  State i carries instantaneous
// correlation rho_i = 2*alpha_i - 1.
struct RegimeConfig {
    Generator gen;
    std::vector<double> q0;
    std::vector<double> alpha;

    int n() const { return gen.n; }
    double rho_of_state(int i) const { return 2.0 * alpha[i] - 1.0; }
    void validate() const;
};

// One realized chain trajectory on [0, horizon]: states[k] holds on
// [jump_times[k-1], jump_times[k]) with jump_times[-1]=0, jump_times[last]=horizon.
struct ChainPath {
    double horizon = 0.0;
    std::vector<double> jump_times; // strictly increasing, inside (0, horizon)
    std::vector<int> states;        // size = jump_times.size() + 1
};

// A complex number stored as exp(log_scale) * value to postpone overflow.
struct ScaledComplex {
    double log_scale = 0.0;
    cd value{0.0};

    cd assemble() const { return std::exp(log_scale) * value; }
};

// P(t) = exp(A t), row-stochastic; entries clamped to [0,1] against rounding.
std::vector<double> transition_matrix(const Generator& g, double t);

// Unique stationary distribution pi with pi^T A = 0, sum(pi) = 1.
// Requires an irreducible chain (checked by strong connectivity).
std::vector<double> stationary_distribution(const Generator& g);

// Matrix exponential of a complex matrix (series-grade accuracy; the dual
// consistency check against a plain Taylor series lives in the test suite).
CMat exp_matrix(const CMat& m);

// Laplace transform of the common clock:  L_t(z) = E[exp(z * T_t)] where
// T_t = integral of alpha over the chain state.  Finite-dimensional formula:
// L_t(z) = q0^T exp((A + z diag(alpha)) t) 1.
cd laplace_T(const RegimeConfig& cfg, double t, cd z);

// Same quantity in scaled form, safe for arguments with large real part.
// Uses closed-form eigenvalues for n <= 3 (with a Pade fallback when the
// spectrum is nearly degenerate) and scaled Pade exponentials otherwise.
ScaledComplex laplace_T_scaled(const RegimeConfig& cfg, double t, cd u);

// E[T_t] = \int_0^t alpha^T E[Q_s] ds with E[Q_s]^T = q0^T P(s)
// (adaptive Simpson quadrature, absolute tolerance 1e-8).
double expected_clock(const RegimeConfig& cfg, double t);

// E[rho_bar_t] where rho_bar_t = (2 T_t - t)/t is the average correlation.
double expected_rho_bar(const RegimeConfig& cfg, double t);

// Exact simulation of the chain trajectory on [0, horizon]:
// one uniform for the initial state, then one uniform per holding time and
// one per jump target.
ChainPath sample_chain_path(const RegimeConfig& cfg, double horizon, RngStream& rng);

// \int_0^t alpha_{state(s)} ds along a realized path (exact, piecewise linear).
double occupation_time(const ChainPath& path, const std::vector<double>& alpha, double t);

} // namespace cobro
