#include "cobro/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace cobro {

namespace {

constexpr double kRowSumTol = 1e-12;

void check_distribution(const std::vector<double>& q, int n, const char* what) {
    if (static_cast<int>(q.size()) != n)
        throw config_error(std::string(what) + ": size mismatch");
    double sum = 0.0;
    for (double v : q) {
        if (!(v >= 0.0)) throw config_error(std::string(what) + ": negative entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw config_error(std::string(what) + ": entries must sum to 1");
}

// Strong connectivity of the directed graph {i -> j : a_ij > 0}.
bool strongly_connected(const Generator& g) {
    const int n = g.n;
    auto reach_all = [&](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                if (v == u || seen[v]) continue;
                const double rate = transpose ? g(v, u) : g(u, v);
                if (rate > 0.0) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
            }
        }
        return count == n;
    };
    return reach_all(false) && reach_all(true);
}

int cdf_pick(const double* w, int n, double u) {
    double acc = 0.0;
    for (int i = 0; i < n - 1; ++i) {
        acc += w[i];
        if (u < acc) return i;
    }
    return n - 1;
}

double simpson_rule(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_rule(fa, flm, fm, m - a);
    const double right = simpson_rule(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson_rule(fa, fm, fb, b - a);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 24);
}

} // namespace

void Generator::validate() const {
    if (n < 1) throw config_error("generator: need at least one state");
    if (a.size() != static_cast<size_t>(n) * n)
        throw config_error("generator: rate matrix size mismatch");
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = (*this)(i, j);
            if (!std::isfinite(v)) throw config_error("generator: non-finite rate");
            if (i != j && v < 0.0) throw config_error("generator: negative off-diagonal rate");
            row += v;
        }
        const double scale = std::max(1.0, -(*this)(i, i));
        if (std::abs(row) > kRowSumTol * scale)
            throw config_error("generator: row does not sum to zero");
    }
}

void RegimeConfig::validate() const {
    gen.validate();
    check_distribution(q0, gen.n, "regime q0");
    if (static_cast<int>(alpha.size()) != gen.n)
        throw config_error("regime alpha: size mismatch");
    for (double v : alpha)
        if (!(v > 0.0 && v < 1.0))
            throw config_error("regime alpha: entries must lie strictly in (0,1)");
}

std::vector<double> transition_matrix(const Generator& g, double t) {
    g.validate();
    if (t < 0.0) throw config_error("transition_matrix: negative time");
    const int n = g.n;
    CMat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = g(i, j) * t;
    const CMat e = expm(m);
    std::vector<double> p(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double v = e(i, j).real();
            if (v < 0.0) {
                if (v < -1e-10) throw numeric_error("transition_matrix: negative probability");
                v = 0.0;
            }
            p[static_cast<size_t>(i) * n + j] = std::min(v, 1.0);
        }
    }
    return p;
}

std::vector<double> stationary_distribution(const Generator& g) {
    g.validate();
    if (!strongly_connected(g))
        throw config_error("stationary_distribution: chain is not irreducible");
    const int n = g.n;

    // Solve A^T pi = 0 with the last equation replaced by sum(pi) = 1.
    CMat m(n);
    std::vector<cd> rhs(n, cd(0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = g(j, i);
    for (int j = 0; j < n; ++j) m(n - 1, j) = 1.0;
    rhs[n - 1] = 1.0;
    solve_lu(m, rhs);

    std::vector<double> pi(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = rhs[i].real();
        if (v < 0.0) {
            if (v < -1e-10) throw numeric_error("stationary_distribution: negative mass");
            v = 0.0;
        }
        pi[i] = v;
        sum += v;
    }
    for (double& v : pi) v /= sum;

    // Postcondition: residual of the balance equations.
    for (int j = 0; j < n; ++j) {
        double r = 0.0;
        for (int i = 0; i < n; ++i) r += pi[i] * g(i, j);
        if (std::abs(r) > 1e-10)
            throw numeric_error("stationary_distribution: balance residual too large");
    }
    return pi;
}

CMat exp_matrix(const CMat& m) { return expm(m); }

namespace {

// q0^T exp(M) 1 for an n x n matrix given by its eigenvalues, via
// Lagrange-Sylvester interpolation.  Returns false when the spectrum is too
// clustered for the interpolation to be well conditioned.
bool ls_interpolate(const cd* m, const double* q0, int n, ScaledComplex& out) {
    cd w[3];
    if (n == 2) eigenvalues_2(m, w);
    else eigenvalues_3(m, w);

    double wmax = 0.0;
    for (int i = 0; i < n; ++i) wmax = std::max(wmax, std::abs(w[i]));
    const double gap_floor = 1e-3 * std::max(1.0, wmax);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(w[i] - w[j]) < gap_floor) return false;

    double shift = w[0].real();
    for (int i = 1; i < n; ++i) shift = std::max(shift, w[i].real());

    // v1 = M 1, v2 = M v1; the interpolation polynomials act on 1.
    cd v1[3], v2[3];
    for (int i = 0; i < n; ++i) {
        cd s(0.0);
        for (int j = 0; j < n; ++j) s += m[i * n + j];
        v1[i] = s;
    }
    cd total(0.0);
    if (n == 2) {
        for (int i = 0; i < 2; ++i) {
            const int j = 1 - i;
            cd num(0.0);
            for (int r = 0; r < 2; ++r) num += q0[r] * (v1[r] - w[j]);
            total += std::exp(w[i] - shift) * num / (w[i] - w[j]);
        }
    } else {
        for (int i = 0; i < 3; ++i) {
            cd s(0.0);
            for (int j = 0; j < 3; ++j) s += m[i * 3 + j] * v1[j];
            v2[i] = s;
        }
        static const int idx[3][3] = {{0, 1, 2}, {1, 0, 2}, {2, 0, 1}};
        for (const auto& t3 : idx) {
            const int i = t3[0], j = t3[1], k = t3[2];
            const cd wj = w[j], wk = w[k];
            cd num(0.0);
            for (int r = 0; r < 3; ++r)
                num += q0[r] * (v2[r] - (wj + wk) * v1[r] + wj * wk);
            total += std::exp(w[i] - shift) * num / ((w[i] - wj) * (w[i] - wk));
        }
    }
    out = {shift, total};
    return true;
}

} // namespace

ScaledComplex laplace_T_scaled(const RegimeConfig& cfg, double t, cd u) {
    const int n = cfg.n();
    const Generator& g = cfg.gen;

    if (n == 1) {
        // Row-sum-zero 1x1 generator is identically zero: L = exp(u * alpha * t).
        const cd w = u * cfg.alpha[0] * t;
        return {w.real(), cfg.q0[0] * std::exp(cd(0.0, w.imag()))};
    }

    // Closed-form eigenvalues + Lagrange-Sylvester interpolation for n <= 3;
    // stack storage keeps this path allocation-free for the inversion loops.
    if (n <= 3) {
        cd m[9];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) m[i * n + j] = g(i, j) * t;
            m[i * n + i] += u * cfg.alpha[i] * t;
        }
        ScaledComplex out;
        if (ls_interpolate(m, cfg.q0.data(), n, out)) return out;
        // Nearly degenerate spectrum: fall through to the Pade route.
    }

    CMat m(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = g(i, j) * t;
        m(i, i) += u * cfg.alpha[i] * t;
    }

    // Shift the diagonal so the exponential stays bounded.
    double c = m(0, 0).real();
    for (int i = 1; i < n; ++i) c = std::max(c, m(i, i).real());
    for (int i = 0; i < n; ++i) m(i, i) -= c;
    const CMat e = expm(m);
    cd total(0.0);
    for (int i = 0; i < n; ++i) {
        cd row(0.0);
        for (int j = 0; j < n; ++j) row += e(i, j);
        total += cfg.q0[i] * row;
    }
    return {c, total};
}

cd laplace_T(const RegimeConfig& cfg, double t, cd z) {
    cfg.validate();
    if (t < 0.0) throw config_error("laplace_T: negative time");
    if (t == 0.0) return cd(1.0);
    const ScaledComplex s = laplace_T_scaled(cfg, t, z);
    return s.assemble();
}

double expected_clock(const RegimeConfig& cfg, double t) {
    cfg.validate();
    if (t < 0.0) throw config_error("expected_clock: negative time");
    if (t == 0.0) return 0.0;
    const int n = cfg.n();
    auto f = [&](double s) {
        const std::vector<double> p = transition_matrix(cfg.gen, s);
        double v = 0.0;
        for (int j = 0; j < n; ++j) {
            double qj = 0.0;
            for (int i = 0; i < n; ++i) qj += cfg.q0[i] * p[static_cast<size_t>(i) * n + j];
            v += cfg.alpha[j] * qj;
        }
        return v;
    };
    return integrate(f, 0.0, t, 1e-8);
}

double expected_rho_bar(const RegimeConfig& cfg, double t) {
    if (t <= 0.0) throw config_error("expected_rho_bar: time must be positive");
    return (2.0 * expected_clock(cfg, t) - t) / t;
}

ChainPath sample_chain_path(const RegimeConfig& cfg, double horizon, RngStream& rng) {
    cfg.validate();
    if (horizon <= 0.0) throw config_error("sample_chain_path: horizon must be positive");
    const int n = cfg.n();

    ChainPath path;
    path.horizon = horizon;
    int s = cdf_pick(cfg.q0.data(), n, rng.uniform());
    path.states.push_back(s);

    std::vector<double> probs(n);
    double t = 0.0;
    for (;;) {
        const double rate = -cfg.gen(s, s);
        if (rate <= 0.0) break; // absorbing state holds forever
        const double hold = -std::log(rng.uniform()) / rate;
        t += hold;
        if (t >= horizon) break;
        for (int j = 0; j < n; ++j) probs[j] = (j == s) ? 0.0 : cfg.gen(s, j) / rate;
        s = cdf_pick(probs.data(), n, rng.uniform());
        path.jump_times.push_back(t);
        path.states.push_back(s);
    }
    return path;
}

double occupation_time(const ChainPath& path, const std::vector<double>& alpha, double t) {
    if (t < 0.0 || t > path.horizon * (1.0 + 1e-12))
        throw config_error("occupation_time: time outside path horizon");
    t = std::min(t, path.horizon);
    double acc = 0.0;
    double seg_start = 0.0;
    for (size_t k = 0; k < path.states.size(); ++k) {
        const double seg_end = (k < path.jump_times.size()) ? path.jump_times[k] : path.horizon;
        const double hi = std::min(seg_end, t);
        if (hi > seg_start) acc += alpha[path.states[k]] * (hi - seg_start);
        if (seg_end >= t) break;
        seg_start = seg_end;
    }
    return acc;
}

} // namespace cobro
