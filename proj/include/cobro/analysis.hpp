#pragma once

#include <cstdint>
#include <vector>

#include "cobro/pricing.hpp"

namespace cobro {

struct QuotePoint {
    double strike = 0.0;
    double price = 0.0;
};

// Market quotes of one rainbow style at one maturity.
struct QuoteSet {
    RainbowStyle style = RainbowStyle::CallOnMax;
    double maturity = 0.0;
    MarketParams market;
    std::vector<QuotePoint> quotes;

    void validate() const;
};

struct CalibrationResult {
    double rho_star = 0.0;
    int iterations = 0;
    double gradient = 0.0;  // objective gradient at the returned point
    double objective = 0.0; // sum of squared price errors
};

// Least-squares fit of a constant correlation to the quotes, by gradient
// descent with the initial step |0.01 / L'(0)|, stopping rule |L'| < 1e-4 and
// backtracking (step halved whenever the objective would increase).
CalibrationResult calibrate_constant_rho(const QuoteSet& quotes, const FourierGrid& grid);

// Correlation implied by a single price through the constant-rho pricer;
// bisection on [-0.999, 0.999] to |d rho| < 1e-6.  Throws numeric_error when
// the price is not attainable within the bracket.
double implied_correlation(double price, const MarketParams& mkt, const RainbowSpec& spec,
                           const FourierGrid& grid);

// Sample variance of the average correlation rho_bar_t over exact chain paths.
double var_rho_bar_mc(const RegimeConfig& cfg, double t, uint64_t n_paths, uint64_t seed);

// Second-order approximation of the regime price around the constant model:
// Price^c(E[rho_bar]) + 0.5 Var(rho_bar) d2Price^c/drho2 (central difference,
// h = 0.01; variance estimated from n_chain_paths exact chain paths).
double taylor_price_approx(const RegimeConfig& cfg, const MarketParams& mkt,
                           const RainbowSpec& spec, const FourierGrid& grid,
                           uint64_t n_chain_paths, uint64_t seed);

// (price_constant - price_dynamic) / price_dynamic.
double relative_error(double price_constant, double price_dynamic);

// Ergodic limit of the correlation estimator: 2 alpha^T pi - 1.
double rho_hat_stationary(const RegimeConfig& cfg);

} // namespace cobro
