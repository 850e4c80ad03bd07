#pragma once

#include <cstdint>
#include <string>

#include "cobro/fourier.hpp"
#include "cobro/simulate.hpp"

namespace cobro {

struct PriceResult {
    double value = 0.0;
    double std_error = 0.0; // 0 for deterministic methods
    std::string method;
};

// Quanto put: foreign asset S (volatility sigma_s, foreign rate r_for) struck
// at K in foreign currency, paid in domestic currency at the fixed rate
// fx_rate0; the FX volatility is sigma_fx and the asset/FX correlation
// follows the regime chain.
struct QuantoSpec {
    double r_dom = 0.0;    // domestic rate (discounting)
    double r_for = 0.0;    // foreign rate (asset drift)
    double fx_rate0 = 1.0; // contractual exchange rate
    double s0 = 0.0;
    double strike = 0.0;
    double maturity = 0.0;
    double sigma_s = 0.0;  // asset volatility (loads on B)
    double sigma_fx = 0.0; // FX volatility (loads on W)

    void validate() const;
};

// Regime-model rainbow price through the two-dimensional Fourier inversion.
double rainbow_price_fourier(const RegimeConfig& cfg, const MarketParams& mkt,
                             const RainbowSpec& spec, const FourierGrid& grid);

// Constant-correlation price, routed through the same inversion pipeline as
// a single-state chain with alpha = (1+rho)/2.  |rho| must be < 1.
double price_constant_rho(const MarketParams& mkt, const RainbowSpec& spec, double rho,
                          const FourierGrid& grid);

// Single-state chain wrapping a constant correlation (shared helper).
RegimeConfig constant_rho_config(double rho);

// Undiscounted terminal payoff of a rainbow style.
double payoff_value(RainbowStyle style, double strike, double s1, double s2);

// Monte Carlo rainbow price via the common-decomposition endpoint sampler.
// The chain skeleton uses n_chain_steps uniform steps (left-endpoint clock);
// at the default 64 the endpoint bias is far below the Monte Carlo noise of
// 1e5 paths for the benchmark configurations.
PriceResult mc_price_rainbow(const RegimeConfig& cfg, const MarketParams& mkt,
                             const RainbowSpec& spec, uint64_t n_paths, uint64_t seed,
                             int n_chain_steps = 64);

// Closed-form quanto put under the regime correlation: the quanto drift
// adjustment exp(ln E) = exp(-sigma_s*sigma_fx*t) * L_t(2*sigma_s*sigma_fx)
// enters an otherwise Black-Scholes formula.
double quanto_put_price(const QuantoSpec& spec, const RegimeConfig& cfg);

// Covariance swap value e^{-rt} (sigma1 sigma2 (2 E[T_t] - t) - strike);
// E[T_t] by quadrature over the chain law.
double covariance_swap_value(const RegimeConfig& cfg, const MarketParams& mkt, double t,
                             double strike);

// Covariance call option e^{-rt} E[(sigma1 sigma2 (2 T_t - t) - strike)^+]
// by exact chain-path Monte Carlo (occupation times are exact per path).
PriceResult covariance_option_value(const RegimeConfig& cfg, const MarketParams& mkt,
                                    double t, double strike, uint64_t n_paths,
                                    uint64_t seed);

// dPrice/dS0_1 of the CallOnMax rainbow through the Fourier pipeline.
double delta_s1_fourier(const RegimeConfig& cfg, const MarketParams& mkt,
                        const RainbowSpec& spec, const FourierGrid& grid);

// Closed-form references used for cross-checks.
double bs_call_price(double s0, double strike, double r, double sigma, double tau);
double margrabe_exchange_price(const MarketParams& mkt, double tau, double rho);

} // namespace cobro
