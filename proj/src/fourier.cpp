#include "cobro/fourier.hpp"

#include <cmath>

#include "cobro/parallel.hpp"

namespace cobro {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Integrand magnitudes below exp(kLogFloor) are dropped from the lattice
// sums; at -60 this is ~1e-26, far below the 1e-9-grade accuracy targets.
constexpr double kLogFloor = -60.0;

} // namespace

RainbowStyle parse_style(const std::string& name) {
    if (name == "call_on_max") return RainbowStyle::CallOnMax;
    if (name == "call_on_min") return RainbowStyle::CallOnMin;
    if (name == "put_on_max") return RainbowStyle::PutOnMax;
    if (name == "put_on_min") return RainbowStyle::PutOnMin;
    if (name == "best_of") return RainbowStyle::BestOf;
    if (name == "exchange") return RainbowStyle::Exchange;
    throw config_error("unknown rainbow style: " + name);
}

std::string style_name(RainbowStyle style) {
    switch (style) {
        case RainbowStyle::CallOnMax: return "call_on_max";
        case RainbowStyle::CallOnMin: return "call_on_min";
        case RainbowStyle::PutOnMax: return "put_on_max";
        case RainbowStyle::PutOnMin: return "put_on_min";
        case RainbowStyle::BestOf: return "best_of";
        case RainbowStyle::Exchange: return "exchange";
    }
    throw config_error("unknown rainbow style enum value");
}

void MarketParams::validate() const {
    if (!(s0_1 > 0.0) || !(s0_2 > 0.0))
        throw config_error("market: spot prices must be positive");
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0))
        throw config_error("market: volatilities must be positive");
    if (!std::isfinite(r)) throw config_error("market: non-finite rate");
}

void RainbowSpec::validate() const {
    if (!(maturity > 0.0)) throw config_error("rainbow spec: maturity must be positive");
    if (style != RainbowStyle::Exchange && strike < 0.0)
        throw config_error("rainbow spec: negative strike");
}

void FourierGrid::validate() const {
    if (n1 < 1 || n < 1) throw config_error("fourier grid: need at least one lattice step");
    if (!(eta1 > 0.0) || !(eta > 0.0))
        throw config_error("fourier grid: step sizes must be positive");
    if (!(lam1_im > 0.0) || !(lam_im > 0.0))
        throw config_error("fourier grid: contour imaginary parts must be positive");
}

PayoffParams payoff_params(RainbowStyle style, const MarketParams& mkt, double strike,
                           double tau) {
    mkt.validate();
    if (!(tau > 0.0)) throw config_error("payoff_params: maturity must be positive");
    if (style != RainbowStyle::Exchange && strike < 0.0)
        throw config_error("payoff_params: negative strike");

    const double beta1 = mkt.s0_1 * std::exp((mkt.r - 0.5 * mkt.sigma1 * mkt.sigma1) * tau);
    const double beta2 = mkt.s0_2 * std::exp((mkt.r - 0.5 * mkt.sigma2 * mkt.sigma2) * tau);
    const double th1[2] = {mkt.sigma1, mkt.sigma1};
    const double th2[2] = {mkt.sigma2, -mkt.sigma2};

    PayoffParams p;
    for (int m = 0; m < 2; ++m) {
        p.term1.theta[m] = th1[m];
        p.term2.theta[m] = th2[m];
    }

    const bool is_call = (style == RainbowStyle::CallOnMax || style == RainbowStyle::CallOnMin ||
                          style == RainbowStyle::BestOf);
    const bool is_put = (style == RainbowStyle::PutOnMax || style == RainbowStyle::PutOnMin);
    const bool on_max = (style == RainbowStyle::CallOnMax || style == RainbowStyle::PutOnMax ||
                         style == RainbowStyle::BestOf || style == RainbowStyle::Exchange);

    if (is_call) {
        // (max/min - K)^+  =  sum_i (beta_i e^{th_i M} - K) 1{asset i selected, S_i >= K}
        p.term1.a = -strike;
        p.term2.a = -strike;
        p.term1.b = beta1;
        p.term2.b = beta2;
        for (int m = 0; m < 2; ++m) {
            p.term1.dir1[m] = -th1[m];
            p.term2.dir1[m] = -th2[m];
        }
        if (strike > 0.0) {
            p.k1 = std::log(beta1 / strike);
            p.k2 = std::log(beta2 / strike);
        } else {
            // K -> 0: the strike indicators are certain; drop them.
            p.k1 = p.k2 = kFarIndicatorLevel;
        }
        if (style == RainbowStyle::BestOf) p.cash = strike;
    } else if (is_put) {
        // (K - max/min)^+  =  sum_i (K - beta_i e^{th_i M}) 1{asset i selected, S_i <= K}
        if (strike == 0.0) {
            p.zero = true;
            return p;
        }
        p.term1.a = strike;
        p.term2.a = strike;
        p.term1.b = -beta1;
        p.term2.b = -beta2;
        for (int m = 0; m < 2; ++m) {
            p.term1.dir1[m] = th1[m];
            p.term2.dir1[m] = th2[m];
        }
        p.k1 = std::log(strike / beta1);
        p.k2 = std::log(strike / beta2);
    } else {
        // Exchange (S1 - S2)^+: no strike gates, both terms share the
        // cross indicator side {S1 >= S2}.
        p.term1.b = beta1;
        p.term2.b = -beta2;
        for (int m = 0; m < 2; ++m) {
            p.term1.dir1[m] = -th1[m];
            p.term2.dir1[m] = -th2[m];
        }
        p.k1 = p.k2 = kFarIndicatorLevel;
    }

    // Cross indicator: term 1 takes {S_sel >= S_other} for max styles (and
    // the exchange), {S_sel <= S_other} for min styles; term 2 is the
    // complement except for the exchange, where both terms share the gate.
    double cross[2], k_cross;
    if (on_max) {
        cross[0] = th2[0] - th1[0];
        cross[1] = th2[1] - th1[1];
        k_cross = std::log(beta1 / beta2);
    } else {
        cross[0] = th1[0] - th2[0];
        cross[1] = th1[1] - th2[1];
        k_cross = std::log(beta2 / beta1);
    }
    const double sign2 = (style == RainbowStyle::Exchange) ? 1.0 : -1.0;
    for (int m = 0; m < 2; ++m) {
        p.term1.dir2[m] = cross[m];
        p.term2.dir2[m] = sign2 * cross[m];
    }
    p.x_cross_1 = k_cross;
    p.x_cross_2 = sign2 * k_cross;
    return p;
}

cd char_fn_M(const RegimeConfig& cfg, double tau, cd z1, cd z2) {
    cfg.validate();
    if (tau < 0.0) throw config_error("char_fn_M: negative maturity");
    if (tau == 0.0) return cd(1.0);
    const cd u = -0.5 * (z1 * z1 - z2 * z2);
    const ScaledComplex l = laplace_T_scaled(cfg, tau, u);
    return std::exp(-0.5 * tau * z2 * z2 + l.log_scale) * l.value;
}

cd g_hat(cd lam1, cd lam, const PayoffTerm& term, const RegimeConfig& cfg, double tau) {
    if (!(lam1.imag() > 0.0) || !(lam.imag() > 0.0))
        throw config_error("g_hat: contour requires positive imaginary parts");
    const cd z1 = lam1 * term.dir1[0] + lam * term.dir2[0];
    const cd z2 = lam1 * term.dir1[1] + lam * term.dir2[1];
    cd out(0.0);
    if (term.a != 0.0) out += term.a * char_fn_M(cfg, tau, z1, z2);
    if (term.b != 0.0)
        out += term.b * char_fn_M(cfg, tau, z1 - cd(0.0, term.theta[0]),
                                  z2 - cd(0.0, term.theta[1]));
    return -out / (lam * lam1);
}

double invert_G(double x1, double x2, const PayoffTerm& term, const RegimeConfig& cfg,
                double tau, const FourierGrid& grid) {
    grid.validate();
    cd acc(0.0);
    for (int j = -grid.n1; j <= grid.n1; ++j) {
        const cd lam1(j * grid.eta1, grid.lam1_im);
        cd row(0.0);
        for (int k = -grid.n; k <= grid.n; ++k) {
            const cd lam(k * grid.eta, grid.lam_im);
            const cd ph = std::exp(cd(grid.lam1_im * x1 + grid.lam_im * x2,
                                      -(j * grid.eta1 * x1 + k * grid.eta * x2)));
            row += ph * g_hat(lam1, lam, term, cfg, tau);
        }
        acc += row;
    }
    acc *= grid.eta1 * grid.eta / (4.0 * kPi * kPi);
    if (std::abs(acc.imag()) > 1e-6)
        throw numeric_error("invert_G: imaginary residue above 1e-6");
    return acc.real();
}

RainbowPricer::RainbowPricer(const RegimeConfig& cfg, const MarketParams& mkt,
                             RainbowStyle style, double tau, const FourierGrid& grid,
                             bool with_delta)
    : cfg_(cfg), mkt_(mkt), style_(style), tau_(tau), grid_(grid), with_delta_(with_delta) {
    cfg_.validate();
    grid_.validate();
    if (!(tau > 0.0)) throw config_error("rainbow pricer: maturity must be positive");
    // Reference strike fixes the strike-independent shape (directions, b_i,
    // cross levels); a_i and k_i are recomputed per priced strike.
    shape_ = payoff_params(style_, mkt_, style_ == RainbowStyle::Exchange ? 0.0 : 100.0, tau_);
    build_term(shape_.term1, shape_.x_cross_1, t1_);
    build_term(shape_.term2, shape_.x_cross_2, t2_);
}

void RainbowPricer::build_term(const PayoffTerm& tm, double x2, TermSums& out) const {
    const int n1 = grid_.n1;
    const int n = grid_.n;
    const double eta1 = grid_.eta1;
    const double eta = grid_.eta;
    const double l1i = grid_.lam1_im;
    const double li = grid_.lam_im;

    out.u0.assign(n1 + 1, cd(0.0));
    out.v0.assign(n1 + 1, cd(0.0));
    if (with_delta_) {
        out.u1.assign(n1 + 1, cd(0.0));
        out.v1.assign(n1 + 1, cd(0.0));
    }

    std::vector<cd> inv_lam(2 * n + 1);
    for (int t = 0; t <= 2 * n; ++t) inv_lam[t] = 1.0 / cd((t - n) * eta, li);

    const bool const_rho = (cfg_.n() == 1);

    parallel_blocks(static_cast<uint64_t>(n1) + 1, 8, [&](uint64_t, uint64_t lo, uint64_t hi) {
        for (uint64_t jj = lo; jj < hi; ++jj) {
            const int j = static_cast<int>(jj);
            const cd lam1(j * eta1, l1i);
            const cd inv_lam1 = 1.0 / lam1;

            // z(k) = lam1*dir1 + lam(k)*dir2 with lam(k) = k*eta + i*li.
            const cd base[2] = {lam1 * tm.dir1[0] + cd(0.0, li) * tm.dir2[0],
                                lam1 * tm.dir1[1] + cd(0.0, li) * tm.dir2[1]};
            const cd base_q[2] = {base[0] - cd(0.0, tm.theta[0]),
                                  base[1] - cd(0.0, tm.theta[1])};

            cd acc_p(0.0), acc_q(0.0), acc_p1(0.0), acc_q1(0.0);

            if (const_rho) {
                // Single-state chain: log Phi is an explicit quadratic in k,
                // marched by an incremental exponential, re-anchored every
                // 128 columns against drift.
                const double al = cfg_.alpha[0];
                const double ab = 1.0 - al;
                const double s1 = eta * tm.dir2[0];
                const double s2 = eta * tm.dir2[1];
                const double c2 = -0.5 * tau_ * (al * s1 * s1 + ab * s2 * s2);
                const double q_step = std::exp(2.0 * c2);

                for (int pass = 0; pass < 2; ++pass) {
                    const cd* a0 = pass ? base_q : base;
                    const cd c1 = -tau_ * (al * a0[0] * s1 + ab * a0[1] * s2) + cd(0.0, -eta * x2);
                    const cd c0 =
                        cd(li * x2, 0.0) - 0.5 * tau_ * (al * a0[0] * a0[0] + ab * a0[1] * a0[1]);
                    cd v(0.0), rr(0.0);
                    cd acc(0.0), acc1(0.0);
                    for (int t = 0; t <= 2 * n; ++t) {
                        const double k = t - n;
                        if (t % 128 == 0) {
                            v = std::exp(c0 + c1 * k + c2 * (k * k));
                            rr = std::exp(c1 + c2 * (2.0 * k + 1.0));
                        }
                        acc += v * inv_lam[t];
                        if (with_delta_) acc1 += v;
                        v *= rr;
                        rr *= q_step;
                    }
                    if (pass == 0) { acc_p = acc; acc_p1 = acc1; }
                    else { acc_q = acc; acc_q1 = acc1; }
                }
            } else {
                for (int t = 0; t <= 2 * n; ++t) {
                    const double kk = (t - n) * eta;
                    const cd colph_log(li * x2, -kk * x2);
                    for (int pass = 0; pass < 2; ++pass) {
                        const cd* a0 = pass ? base_q : base;
                        const cd z1 = a0[0] + kk * tm.dir2[0];
                        const cd z2 = a0[1] + kk * tm.dir2[1];
                        const cd u = -0.5 * (z1 * z1 - z2 * z2);
                        const ScaledComplex l = laplace_T_scaled(cfg_, tau_, u);
                        const cd arg = -0.5 * tau_ * z2 * z2 + l.log_scale + colph_log;
                        if (arg.real() <= kLogFloor) continue;
                        const cd val = std::exp(arg) * l.value;
                        if (pass == 0) {
                            acc_p += val * inv_lam[t];
                            if (with_delta_) acc_p1 += val;
                        } else {
                            acc_q += val * inv_lam[t];
                            if (with_delta_) acc_q1 += val;
                        }
                    }
                }
            }

            out.u0[jj] = acc_p * inv_lam1;
            out.v0[jj] = acc_q * inv_lam1;
            if (with_delta_) {
                out.u1[jj] = acc_p1 * inv_lam1;
                out.v1[jj] = acc_q1 * inv_lam1;
            }
        }
    });
}

namespace {

// Folds row sums against the row phase exp(l1i*x1) * exp(-i j eta1 x1),
// with half weight on the j = 0 row.  RowFn(j) -> cd supplies the row value.
template <class RowFn>
cd fold_rows(int n1, double eta1, double l1i, double x1, RowFn&& row) {
    cd acc = 0.5 * row(0);
    const cd rot = std::exp(cd(0.0, -eta1 * x1));
    cd ph(1.0);
    for (int j = 1; j <= n1; ++j) {
        if (j % 128 == 0) ph = std::exp(cd(0.0, -eta1 * x1 * j));
        else ph *= rot;
        acc += ph * row(j);
    }
    return std::exp(cd(l1i * x1, 0.0)) * acc;
}

} // namespace

double RainbowPricer::price_raw(double strike) const {
    const PayoffParams pk = payoff_params(style_, mkt_, strike, tau_);
    if (pk.zero) return 0.0;

    const auto term_sum = [&](const TermSums& ts, const PayoffTerm& tm, double x1) {
        return fold_rows(grid_.n1, grid_.eta1, grid_.lam1_im, x1,
                         [&](int j) { return -(tm.a * ts.u0[j] + tm.b * ts.v0[j]); });
    };
    const cd g = term_sum(t1_, pk.term1, pk.k1) + term_sum(t2_, pk.term2, pk.k2);
    const double total = 2.0 * g.real() * grid_.eta1 * grid_.eta / (4.0 * kPi * kPi);
    const double value = std::exp(-mkt_.r * tau_) * (total + pk.cash);

    if (!std::isfinite(value)) throw numeric_error("rainbow price: non-finite result");
    return value;
}

double RainbowPricer::price(double strike) const {
    double value = price_raw(strike);
    if (value < 0.0) {
        // Truncation ringing: tiny negatives deep out of the money are
        // clamped; anything larger means the lattice is too coarse for the
        // requested strike.
        if (value < -1e-6)
            throw numeric_error("rainbow price: negative beyond tolerance (grid too coarse)");
        value = 0.0;
    }
    return value;
}

double RainbowPricer::delta_s1(double strike) const {
    if (style_ != RainbowStyle::CallOnMax)
        throw config_error("delta_s1: supported for call_on_max only");
    if (!with_delta_)
        throw config_error("delta_s1: pricer was built without delta row sums");

    const PayoffParams pk = payoff_params(style_, mkt_, strike, tau_);
    const double s01 = mkt_.s0_1;
    const double eta1 = grid_.eta1;
    const cd i_unit(0.0, 1.0);

    // Term 1 transform differentiated in S0_1:
    //   (i a / S)(1/lam + 1/lam1) Phi
    // + [(i b / S)(1/lam + 1/lam1) - (b / S)/(lam lam1)] Phi_shifted.
    const cd g1 = fold_rows(grid_.n1, eta1, grid_.lam1_im, pk.k1, [&](int j) {
        const cd lam1(j * eta1, grid_.lam1_im);
        const cd p_mix = lam1 * t1_.u0[j] + t1_.u1[j]; // (1/lam + 1/lam1) Phi row
        const cd q_mix = lam1 * t1_.v0[j] + t1_.v1[j];
        return (i_unit * (pk.term1.a * p_mix + pk.term1.b * q_mix) - pk.term1.b * t1_.v0[j]) /
               s01;
    });
    // Term 2 transform: -(i/(S lam1)) (a Phi + b Phi_shifted).
    const cd g2 = fold_rows(grid_.n1, eta1, grid_.lam1_im, pk.k2, [&](int j) {
        return -i_unit * (pk.term2.a * t2_.u1[j] + pk.term2.b * t2_.v1[j]) / s01;
    });

    const double total = 2.0 * (g1 + g2).real() * eta1 * grid_.eta / (4.0 * kPi * kPi);
    const double delta = std::exp(-mkt_.r * tau_) * total;
    if (!std::isfinite(delta)) throw numeric_error("delta_s1: non-finite result");
    return delta;
}

} // namespace cobro
