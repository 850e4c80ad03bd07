#include "cobro/pricing.hpp"

#include <algorithm>
#include <cmath>

#include "cobro/parallel.hpp"

namespace cobro {

namespace {

struct MomentSums {
    double sum = 0.0;
    double sum_sq = 0.0;
};

PriceResult mc_from_sums(const MomentSums& s, uint64_t n, const char* method) {
    PriceResult out;
    out.method = method;
    const double nn = static_cast<double>(n);
    out.value = s.sum / nn;
    const double var = std::max(0.0, (s.sum_sq - nn * out.value * out.value) / (nn - 1.0));
    out.std_error = std::sqrt(var / nn);
    return out;
}

} // namespace

void QuantoSpec::validate() const {
    if (!(s0 > 0.0)) throw config_error("quanto: spot must be positive");
    if (strike < 0.0) throw config_error("quanto: negative strike");
    if (!(maturity > 0.0)) throw config_error("quanto: maturity must be positive");
    if (!(fx_rate0 > 0.0)) throw config_error("quanto: exchange rate must be positive");
    if (sigma_s < 0.0 || sigma_fx < 0.0) throw config_error("quanto: negative volatility");
    if (!std::isfinite(r_dom) || !std::isfinite(r_for))
        throw config_error("quanto: non-finite rate");
}

RegimeConfig constant_rho_config(double rho) {
    if (!(rho > -1.0 && rho < 1.0))
        throw config_error("constant correlation must lie strictly in (-1, 1)");
    RegimeConfig cfg;
    cfg.gen.n = 1;
    cfg.gen.a = {0.0};
    cfg.q0 = {1.0};
    cfg.alpha = {0.5 * (1.0 + rho)};
    return cfg;
}

double rainbow_price_fourier(const RegimeConfig& cfg, const MarketParams& mkt,
                             const RainbowSpec& spec, const FourierGrid& grid) {
    spec.validate();
    const RainbowPricer pricer(cfg, mkt, spec.style, spec.maturity, grid);
    return pricer.price(spec.strike);
}

double price_constant_rho(const MarketParams& mkt, const RainbowSpec& spec, double rho,
                          const FourierGrid& grid) {
    return rainbow_price_fourier(constant_rho_config(rho), mkt, spec, grid);
}

double payoff_value(RainbowStyle style, double strike, double s1, double s2) {
    const double mx = std::max(s1, s2);
    const double mn = std::min(s1, s2);
    switch (style) {
        case RainbowStyle::CallOnMax: return std::max(mx - strike, 0.0);
        case RainbowStyle::CallOnMin: return std::max(mn - strike, 0.0);
        case RainbowStyle::PutOnMax: return std::max(strike - mx, 0.0);
        case RainbowStyle::PutOnMin: return std::max(strike - mn, 0.0);
        case RainbowStyle::BestOf: return std::max(mx, strike);
        case RainbowStyle::Exchange: return std::max(s1 - s2, 0.0);
    }
    throw config_error("payoff_value: unknown style");
}

PriceResult mc_price_rainbow(const RegimeConfig& cfg, const MarketParams& mkt,
                             const RainbowSpec& spec, uint64_t n_paths, uint64_t seed,
                             int n_chain_steps) {
    cfg.validate();
    mkt.validate();
    spec.validate();
    if (n_paths < 100) throw config_error("mc_price_rainbow: need at least 100 paths");
    if (n_chain_steps < 1) throw config_error("mc_price_rainbow: need at least one step");

    const double tau = spec.maturity;
    const double d1 = (mkt.r - 0.5 * mkt.sigma1 * mkt.sigma1) * tau;
    const double d2 = (mkt.r - 0.5 * mkt.sigma2 * mkt.sigma2) * tau;
    const double disc = std::exp(-mkt.r * tau);

    const MomentSums total = parallel_map_reduce<MomentSums>(
        n_paths, 4096, MomentSums{},
        [&](uint64_t lo, uint64_t hi) {
            MomentSums part;
            for (uint64_t i = lo; i < hi; ++i) {
                RngStream rng(seed, i);
                const EndpointSample e = simulate_cd_endpoint(cfg, tau, n_chain_steps, rng);
                const double s1 = mkt.s0_1 * std::exp(d1 + mkt.sigma1 * e.b);
                const double s2 = mkt.s0_2 * std::exp(d2 + mkt.sigma2 * e.w);
                const double p = disc * payoff_value(spec.style, spec.strike, s1, s2);
                part.sum += p;
                part.sum_sq += p * p;
            }
            return part;
        },
        [](MomentSums a, const MomentSums& b) {
            a.sum += b.sum;
            a.sum_sq += b.sum_sq;
            return a;
        });

    return mc_from_sums(total, n_paths, "mc");
}

double quanto_put_price(const QuantoSpec& spec, const RegimeConfig& cfg) {
    spec.validate();
    cfg.validate();
    const double t = spec.maturity;
    const double prod = spec.sigma_s * spec.sigma_fx;

    // ln E = -sigma_s sigma_fx t + ln L_t(2 sigma_s sigma_fx); for a constant
    // correlation this reduces to rho sigma_s sigma_fx t.
    double ln_e = 0.0;
    if (prod > 0.0) {
        const cd l = laplace_T(cfg, t, cd(2.0 * prod, 0.0));
        ln_e = -prod * t + std::log(l.real());
    }
    const double fwd = spec.s0 * std::exp(spec.r_for * t - ln_e); // quanto-adjusted forward
    const double disc = spec.fx_rate0 * std::exp(-spec.r_dom * t);

    if (spec.sigma_s == 0.0) // deterministic asset: intrinsic on the forward
        return disc * std::max(spec.strike - fwd, 0.0);
    if (spec.strike == 0.0) return 0.0;

    const double sq = spec.sigma_s * std::sqrt(t);
    const double d1 = (std::log(fwd / spec.strike) + 0.5 * sq * sq) / sq;
    const double d2 = d1 - sq;
    return disc * (spec.strike * normal_cdf(-d2) - fwd * normal_cdf(-d1));
}

double covariance_swap_value(const RegimeConfig& cfg, const MarketParams& mkt, double t,
                             double strike) {
    mkt.validate();
    if (!(t > 0.0)) throw config_error("covariance_swap_value: time must be positive");
    const double e_clock = expected_clock(cfg, t);
    return std::exp(-mkt.r * t) * (mkt.sigma1 * mkt.sigma2 * (2.0 * e_clock - t) - strike);
}

PriceResult covariance_option_value(const RegimeConfig& cfg, const MarketParams& mkt,
                                    double t, double strike, uint64_t n_paths,
                                    uint64_t seed) {
    cfg.validate();
    mkt.validate();
    if (!(t > 0.0)) throw config_error("covariance_option_value: time must be positive");
    if (n_paths < 100) throw config_error("covariance_option_value: need at least 100 paths");

    const double disc = std::exp(-mkt.r * t);
    const double vv = mkt.sigma1 * mkt.sigma2;

    const MomentSums total = parallel_map_reduce<MomentSums>(
        n_paths, 4096, MomentSums{},
        [&](uint64_t lo, uint64_t hi) {
            MomentSums part;
            for (uint64_t i = lo; i < hi; ++i) {
                RngStream rng(seed, i);
                const ChainPath path = sample_chain_path(cfg, t, rng);
                const double clock = occupation_time(path, cfg.alpha, t);
                const double p = disc * std::max(vv * (2.0 * clock - t) - strike, 0.0);
                part.sum += p;
                part.sum_sq += p * p;
            }
            return part;
        },
        [](MomentSums a, const MomentSums& b) {
            a.sum += b.sum;
            a.sum_sq += b.sum_sq;
            return a;
        });

    return mc_from_sums(total, n_paths, "mc");
}

double delta_s1_fourier(const RegimeConfig& cfg, const MarketParams& mkt,
                        const RainbowSpec& spec, const FourierGrid& grid) {
    spec.validate();
    const RainbowPricer pricer(cfg, mkt, spec.style, spec.maturity, grid, /*with_delta=*/true);
    return pricer.delta_s1(spec.strike);
}

double bs_call_price(double s0, double strike, double r, double sigma, double tau) {
    if (strike <= 0.0) return s0;
    const double sq = sigma * std::sqrt(tau);
    const double d1 = (std::log(s0 / strike) + (r + 0.5 * sigma * sigma) * tau) / sq;
    const double d2 = d1 - sq;
    return s0 * normal_cdf(d1) - strike * std::exp(-r * tau) * normal_cdf(d2);
}

double margrabe_exchange_price(const MarketParams& mkt, double tau, double rho) {
    const double s = std::sqrt(mkt.sigma1 * mkt.sigma1 + mkt.sigma2 * mkt.sigma2 -
                               2.0 * rho * mkt.sigma1 * mkt.sigma2);
    const double sq = s * std::sqrt(tau);
    const double d1 = (std::log(mkt.s0_1 / mkt.s0_2) + 0.5 * sq * sq) / sq;
    return mkt.s0_1 * normal_cdf(d1) - mkt.s0_2 * normal_cdf(d1 - sq);
}

} // namespace cobro
