#pragma once

#include <string>
#include <vector>

#include "cobro/ctmc.hpp"

namespace cobro {

enum class RainbowStyle { CallOnMax, CallOnMin, PutOnMax, PutOnMin, BestOf, Exchange };

RainbowStyle parse_style(const std::string& name); // throws config_error on unknown name
std::string style_name(RainbowStyle style);

struct MarketParams {
    double r = 0.0;       // risk-free rate
    double s0_1 = 0.0;    // spot of asset 1 (driven by B)
    double s0_2 = 0.0;    // spot of asset 2 (driven by W)
    double sigma1 = 0.0;
    double sigma2 = 0.0;

    void validate() const;
};

struct RainbowSpec {
    RainbowStyle style = RainbowStyle::CallOnMax;
    double strike = 0.0;
    double maturity = 0.0;

    void validate() const;
};

// Truncated-lattice parameters of the two-dimensional inversion:
// lambda1 = j*eta1 + i*lam1_im (j = -n1..n1), lambda = k*eta + i*lam_im.
struct FourierGrid {
    int n1 = 1000;
    int n = 1000;
    double eta1 = 0.1;
    double eta = 0.1;
    double lam1_im = 1.0;
    double lam_im = 1.0;

    void validate() const;
};

// One payoff term (a + b exp(theta.M)) 1{dir1.M <= x1} 1{dir2.M <= x2},
// where M = (X at clock T, Y at clock S).
struct PayoffTerm {
    double a = 0.0;
    double b = 0.0;
    double theta[2] = {0.0, 0.0};
    double dir1[2] = {0.0, 0.0};
    double dir2[2] = {0.0, 0.0};
};

// Two-term decomposition of a rainbow payoff.  Term i is inverted at
// (x1 = k_i, x2 = x_cross_i); signs of dir2 / x_cross already encode which
// side of the cross indicator each term takes.
struct PayoffParams {
    PayoffTerm term1, term2;
    double k1 = 0.0, k2 = 0.0;          // per-term log-strike levels
    double x_cross_1 = 0.0, x_cross_2 = 0.0;
    double cash = 0.0;                  // strike-independent cash leg
    bool zero = false;                  // payoff identically zero (puts at K=0)
};

// Log-level used in place of a dropped indicator (strike K -> 0 for calls,
// and both per-term gates of the exchange payoff).  exp(-x) is far below
// every other tolerance in the pipeline at this level.
inline constexpr double kFarIndicatorLevel = 2.0;

PayoffParams payoff_params(RainbowStyle style, const MarketParams& mkt, double strike,
                           double tau);

// Joint characteristic function (analytically extended) of the driver pair:
// E[exp(i z1 M1 + i z2 M2)] = exp(-tau z2^2 / 2) * L_tau(-(z1^2 - z2^2)/2).
cd char_fn_M(const RegimeConfig& cfg, double tau, cd z1, cd z2);

// Fourier transform of one gated payoff term; analytic for Im(lam1), Im(lam) > 0:
//   g_hat = -(a/(lam lam1)) Phi(lam1 dir1 + lam dir2)
//           -(b/(lam lam1)) Phi(lam1 dir1 + lam dir2 - i theta).
cd g_hat(cd lam1, cd lam, const PayoffTerm& term, const RegimeConfig& cfg, double tau);

// Direct lattice inversion of g_hat at (x1, x2): full double sum over both
// half-planes, no symmetry shortcut.  The imaginary residue must stay below
// 1e-6 (numeric_error otherwise); nominal accuracy leaves it below 1e-8.
double invert_G(double x1, double x2, const PayoffTerm& term, const RegimeConfig& cfg,
                double tau, const FourierGrid& grid);

// Strike-reusable pricer: builds the strike-independent row sums of the
// integrand once per (regime, market, style, maturity, grid), then prices
// any strike in O(n1).  Row sums exploit the conjugate symmetry
// g_hat(-conj(lam1), -conj(lam)) = conj(g_hat(lam1, lam)), so only j >= 0
// rows are stored and the result is twice the real part (row 0 half-weight).
class RainbowPricer {
public:
    RainbowPricer(const RegimeConfig& cfg, const MarketParams& mkt, RainbowStyle style,
                  double tau, const FourierGrid& grid, bool with_delta = false);

    // Discounted price at the given strike.  Ignores the strike for the
    // exchange style (which has none).  Tiny negatives from truncation
    // ringing are clamped to zero; below -1e-6 a numeric_error is thrown.
    double price(double strike) const;

    // Signed inversion value without the positivity guard.  Deep out of the
    // money the lattice truncation rings at the 1e-3 level, which swamps
    // prices whose true value is smaller; iterative procedures (calibration,
    // implied correlation, error curves) evaluate this raw value so the
    // comparison stays well defined at every strike.
    double price_raw(double strike) const;

    // dPrice/dS0_1 for CallOnMax; requires construction with with_delta.
    double delta_s1(double strike) const;

    RainbowStyle style() const { return style_; }
    double maturity() const { return tau_; }
    const FourierGrid& grid() const { return grid_; }

private:
    struct TermSums {
        std::vector<cd> u0, v0; // sum_k colph * Phi{,shifted} / (lam * lam1)
        std::vector<cd> u1, v1; // sum_k colph * Phi{,shifted} / lam1 (delta only)
    };

    void build_term(const PayoffTerm& term, double x2, TermSums& out) const;

    RegimeConfig cfg_;
    MarketParams mkt_;
    RainbowStyle style_;
    double tau_;
    FourierGrid grid_;
    bool with_delta_;
    PayoffParams shape_; // strike-independent parts (built at a reference strike)
    TermSums t1_, t2_;
};

} // namespace cobro
