#include "cobro/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "cobro/parallel.hpp"

namespace cobro {

namespace {

constexpr double kRhoBound = 0.999;

double clamp_rho(double rho) { return std::min(kRhoBound, std::max(-kRhoBound, rho)); }

// Sum of squared errors of the constant-rho model against the quotes.
// One inversion build per evaluation; all strikes reuse it.  Uses the raw
// signed price so deep out-of-the-money ringing cannot abort the search.
double objective(const QuoteSet& qs, const FourierGrid& grid, double rho) {
    const RainbowPricer pricer(constant_rho_config(rho), qs.market, qs.style, qs.maturity,
                               grid);
    double acc = 0.0;
    for (const QuotePoint& q : qs.quotes) {
        const double d = pricer.price_raw(q.strike) - q.price;
        acc += d * d;
    }
    return acc;
}

} // namespace

void QuoteSet::validate() const {
    market.validate();
    if (!(maturity > 0.0)) throw config_error("quote set: maturity must be positive");
    if (quotes.empty()) throw config_error("quote set: no quotes");
    for (const QuotePoint& q : quotes)
        if (q.strike < 0.0 || !std::isfinite(q.price))
            throw config_error("quote set: bad quote entry");
}

CalibrationResult calibrate_constant_rho(const QuoteSet& quotes, const FourierGrid& grid) {
    quotes.validate();
    grid.validate();

    const auto l_of = [&](double rho) { return objective(quotes, grid, rho); };
    const double h = 1e-4;
    const auto grad = [&](double rho) {
        return (l_of(clamp_rho(rho + h)) - l_of(clamp_rho(rho - h))) / (2.0 * h);
    };

    const int max_iters = 10000;
    double rho = 0.0;
    double g = grad(rho);
    double step = std::abs(g) > 0.0 ? std::abs(0.01 / g) : 0.0;
    double l_cur = l_of(rho);

    CalibrationResult out;
    while (std::abs(g) >= 1e-4) {
        if (out.iterations >= max_iters)
            throw numeric_error("calibrate_constant_rho: no convergence after " +
                                std::to_string(max_iters) + " iterations (|grad| = " +
                                std::to_string(std::abs(g)) + ")");
        double cand = clamp_rho(rho - step * g);
        double l_cand = l_of(cand);
        while (l_cand > l_cur && step > 1e-12) { // backtrack: never accept an increase
            step *= 0.5;
            cand = clamp_rho(rho - step * g);
            l_cand = l_of(cand);
        }
        rho = cand;
        l_cur = l_cand;
        g = grad(rho);
        ++out.iterations;
    }

    out.rho_star = rho;
    out.gradient = g;
    out.objective = l_cur;
    return out;
}

double implied_correlation(double price, const MarketParams& mkt, const RainbowSpec& spec,
                           const FourierGrid& grid) {
    if (!(price > 0.0)) throw numeric_error("implied_correlation: unattainable price");
    spec.validate();
    grid.validate();

    const auto pc = [&](double rho) {
        const RainbowPricer pricer(constant_rho_config(rho), mkt, spec.style, spec.maturity,
                                   grid);
        return pricer.price_raw(spec.strike);
    };

    double lo = -kRhoBound, hi = kRhoBound;
    double f_lo = pc(lo) - price;
    double f_hi = pc(hi) - price;
    if (f_lo * f_hi > 0.0)
        throw numeric_error("implied_correlation: unattainable price (no bracket)");

    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = pc(mid) - price;
        if (f_lo * f_mid <= 0.0) {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    return 0.5 * (lo + hi);
}

double var_rho_bar_mc(const RegimeConfig& cfg, double t, uint64_t n_paths, uint64_t seed) {
    cfg.validate();
    if (!(t > 0.0)) throw config_error("var_rho_bar_mc: time must be positive");
    if (n_paths < 2) throw config_error("var_rho_bar_mc: need at least two paths");

    struct Sums {
        double s = 0.0, s2 = 0.0;
    };
    const Sums total = parallel_map_reduce<Sums>(
        n_paths, 4096, Sums{},
        [&](uint64_t lo, uint64_t hi) {
            Sums part;
            for (uint64_t i = lo; i < hi; ++i) {
                RngStream rng(seed, i);
                const ChainPath path = sample_chain_path(cfg, t, rng);
                const double rb = (2.0 * occupation_time(path, cfg.alpha, t) - t) / t;
                part.s += rb;
                part.s2 += rb * rb;
            }
            return part;
        },
        [](Sums a, const Sums& b) {
            a.s += b.s;
            a.s2 += b.s2;
            return a;
        });

    const double n = static_cast<double>(n_paths);
    const double mean = total.s / n;
    return std::max(0.0, (total.s2 - n * mean * mean) / (n - 1.0));
}

double taylor_price_approx(const RegimeConfig& cfg, const MarketParams& mkt,
                           const RainbowSpec& spec, const FourierGrid& grid,
                           uint64_t n_chain_paths, uint64_t seed) {
    spec.validate();
    const double e_rho = expected_rho_bar(cfg, spec.maturity);
    const double var = var_rho_bar_mc(cfg, spec.maturity, n_chain_paths, seed);

    const double h = 0.01;
    const double p0 = price_constant_rho(mkt, spec, e_rho, grid);
    const double pp = price_constant_rho(mkt, spec, clamp_rho(e_rho + h), grid);
    const double pm = price_constant_rho(mkt, spec, clamp_rho(e_rho - h), grid);
    const double d2 = (pp - 2.0 * p0 + pm) / (h * h);

    return p0 + 0.5 * var * d2;
}

double relative_error(double price_constant, double price_dynamic) {
    if (price_dynamic == 0.0)
        throw config_error("relative_error: zero dynamic price");
    return (price_constant - price_dynamic) / price_dynamic;
}

double rho_hat_stationary(const RegimeConfig& cfg) {
    cfg.validate();
    const std::vector<double> pi = stationary_distribution(cfg.gen);
    double acc = 0.0;
    for (int i = 0; i < cfg.n(); ++i) acc += cfg.alpha[i] * pi[i];
    return 2.0 * acc - 1.0;
}

} // namespace cobro
