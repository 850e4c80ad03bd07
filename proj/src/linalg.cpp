#include "cobro/linalg.hpp"

#include <cmath>
#include <cstdlib>

namespace cobro {

CMat CMat::identity(int n) {
    CMat r(n);
    for (int i = 0; i < n; ++i) r(i, i) = 1.0;
    return r;
}

CMat operator*(const CMat& x, const CMat& y) {
    const int n = x.n;
    CMat r(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const cd xik = x(i, k);
            if (xik == cd(0.0)) continue;
            for (int j = 0; j < n; ++j) r(i, j) += xik * y(k, j);
        }
    return r;
}

CMat operator+(const CMat& x, const CMat& y) {
    CMat r(x.n);
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

CMat operator-(const CMat& x, const CMat& y) {
    CMat r(x.n);
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

CMat scale(const CMat& x, cd s) {
    CMat r(x.n);
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] * s;
    return r;
}

double norm_1(const CMat& m) {
    double best = 0.0;
    for (int j = 0; j < m.n; ++j) {
        double col = 0.0;
        for (int i = 0; i < m.n; ++i) col += std::abs(m(i, j));
        best = std::max(best, col);
    }
    return best;
}

void solve_lu(CMat a, std::vector<cd>& b) {
    const int n = a.n;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(a(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) throw numeric_error("solve_lu: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        const cd inv = 1.0 / a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const cd f = a(i, k) * inv;
            if (f == cd(0.0)) continue;
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        cd s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * b[j];
        b[i] = s / a(i, i);
    }
}

void solve_lu_mat(const CMat& a, CMat& b) {
    const int n = a.n;
    std::vector<cd> col(n);
    CMat out(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) col[i] = b(i, j);
        solve_lu(a, col);
        for (int i = 0; i < n; ++i) out(i, j) = col[i];
    }
    b = out;
}

CMat expm(const CMat& m) {
    for (const cd& v : m.a)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw numeric_error("expm: non-finite entry");

    // Degree-13 Pade coefficients.
    static const double b[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    static const double theta13 = 5.371920351148152;

    const int n = m.n;
    const double nrm = norm_1(m);
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));

    CMat a = (s > 0) ? scale(m, std::ldexp(1.0, -s)) : m;
    const CMat id = CMat::identity(n);

    const CMat a2 = a * a;
    const CMat a4 = a2 * a2;
    const CMat a6 = a4 * a2;

    CMat u_in = scale(a6, b[13]) + scale(a4, b[11]) + scale(a2, b[9]);
    u_in = a6 * u_in;
    u_in = u_in + scale(a6, b[7]) + scale(a4, b[5]) + scale(a2, b[3]) + scale(id, b[1]);
    const CMat u = a * u_in;

    CMat v = scale(a6, b[12]) + scale(a4, b[10]) + scale(a2, b[8]);
    v = a6 * v;
    v = v + scale(a6, b[6]) + scale(a4, b[4]) + scale(a2, b[2]) + scale(id, b[0]);

    CMat p = v + u;
    CMat q = v - u;
    solve_lu_mat(q, p); // p := q^{-1} p

    for (int i = 0; i < s; ++i) p = p * p;
    return p;
}

void eigenvalues_2(const cd* m, cd w[2]) {
    const cd tr = m[0] + m[3];
    const cd det = m[0] * m[3] - m[1] * m[2];
    const cd d = std::sqrt(tr * tr - 4.0 * det);
    w[0] = 0.5 * (tr + d);
    w[1] = 0.5 * (tr - d);
}

void eigenvalues_3(const cd* m, cd w[3]) {
    // Characteristic polynomial w^3 + p w^2 + q w + r.
    const cd p = -(m[0] + m[4] + m[8]);
    const cd q = (m[0] * m[4] - m[1] * m[3]) +
                 (m[0] * m[8] - m[2] * m[6]) +
                 (m[4] * m[8] - m[5] * m[7]);
    const cd r = -(m[0] * (m[4] * m[8] - m[5] * m[7]) -
                   m[1] * (m[3] * m[8] - m[5] * m[6]) +
                   m[2] * (m[3] * m[7] - m[4] * m[6]));

    // Depressed cubic y^3 + a y + b with w = y - p/3 (Cardano).
    const cd a = q - p * p / 3.0;
    const cd bb = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;

    const cd disc = std::sqrt(bb * bb * 0.25 + a * a * a / 27.0);
    cd s = -bb * 0.5 + disc;
    const cd s_alt = -bb * 0.5 - disc;
    if (std::abs(s_alt) > std::abs(s)) s = s_alt;
    s = std::pow(s, 1.0 / 3.0);

    cd t(0.0);
    if (std::abs(s) > 0.0) t = -a / (3.0 * s);

    const cd om(-0.5, 0.8660254037844386467637231707529362); // exp(2*pi*i/3)
    const cd omc = std::conj(om);
    const cd shift = p / 3.0;
    w[0] = s + t - shift;
    w[1] = om * s + omc * t - shift;
    w[2] = omc * s + om * t - shift;
}

} // namespace cobro
