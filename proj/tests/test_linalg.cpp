#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "cobro/errors.hpp"
#include "cobro/linalg.hpp"

using namespace cobro;

namespace {

// Independent reference: plain Taylor series of exp(M).  Reliable for
// moderate norms only, which is exactly what makes it a useful cross-check
// for the scaling-and-squaring implementation.
CMat taylor_exp(const CMat& m, int terms = 300) {
    CMat sum = CMat::identity(m.n);
    CMat pow = CMat::identity(m.n);
    for (int k = 1; k <= terms; ++k) {
        pow = scale(pow * m, 1.0 / k);
        for (size_t i = 0; i < sum.a.size(); ++i) sum.a[i] += pow.a[i];
    }
    return sum;
}

double max_abs_diff(const CMat& a, const CMat& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.a.size(); ++i) d = std::max(d, std::abs(a.a[i] - b.a[i]));
    return d;
}

CMat generator_times(double t) {
    CMat m(3);
    const double a[9] = {-1.0, 0.8, 0.2, 0.4, -1.0, 0.6, 0.3, 0.7, -1.0};
    for (int i = 0; i < 9; ++i) m.a[i] = a[i] * t;
    return m;
}

cd det3(const CMat& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

} // namespace

TEST_CASE("matrix exponential of the zero matrix is the identity") {
    CMat z(3);
    CHECK(max_abs_diff(expm(z), CMat::identity(3)) == 0.0);
}

TEST_CASE("matrix exponential of a diagonal matrix is elementwise exp") {
    CMat m(3);
    m(0, 0) = 1.0;
    m(1, 1) = cd(0.0, 2.0);
    m(2, 2) = -3.0;
    const CMat e = expm(m);
    CHECK(std::abs(e(0, 0) - std::exp(cd(1.0))) < 1e-14);
    CHECK(std::abs(e(1, 1) - std::exp(cd(0.0, 2.0))) < 1e-14);
    CHECK(std::abs(e(2, 2) - std::exp(cd(-3.0))) < 1e-14);
    CHECK(std::abs(e(0, 1)) < 1e-15);
}

TEST_CASE("matrix exponential of a nilpotent matrix terminates the series") {
    CMat m(2);
    m(0, 1) = 1.0;
    const CMat e = expm(m);
    CHECK(std::abs(e(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(e(0, 1) - 1.0) < 1e-15);
    CHECK(std::abs(e(1, 0)) < 1e-15);
    CHECK(std::abs(e(1, 1) - 1.0) < 1e-15);
}

TEST_CASE("matrix exponential matches a long Taylor series on moderate norms") {
    for (const double t : {0.1, 1.0, 2.5}) {
        const CMat m = generator_times(t);
        CHECK(max_abs_diff(expm(m), taylor_exp(m)) < 1e-12);
    }

    CMat c(4);
    // Fixed complex matrix with entries of mixed sign and magnitude.
    const double re[16] = {0.3, -1.1, 0.7, 0.2, 0.9, 0.4, -0.5, 1.3,
                           -0.2, 0.8, -0.9, 0.1, 0.5, -0.3, 0.6, -1.2};
    const double im[16] = {0.1, 0.4, -0.6, 0.0, -0.8, 0.2, 0.3, -0.1,
                           0.7, -0.4, 0.5, 0.9, -0.2, 0.6, 0.0, -0.5};
    for (int i = 0; i < 16; ++i) c.a[i] = cd(re[i], im[i]);
    CHECK(max_abs_diff(expm(c), taylor_exp(c)) < 1e-12);
}

TEST_CASE("matrix exponential respects the squaring identity at large norms") {
    const CMat m = generator_times(40.0); // 1-norm around 80
    const CMat half = scale(m, 0.5);
    const CMat via_half = expm(half) * expm(half);
    const CMat whole = expm(m);
    // exp(A t) for a generator stays bounded (row-stochastic), so absolute
    // comparison is meaningful.
    CHECK(max_abs_diff(whole, via_half) < 1e-10);
}

TEST_CASE("matrix exponential of a generator has unit row sums") {
    const CMat e = expm(generator_times(1.7));
    for (int i = 0; i < 3; ++i) {
        cd row = 0.0;
        for (int j = 0; j < 3; ++j) row += e(i, j);
        CHECK(std::abs(row - 1.0) < 1e-13);
    }
}

TEST_CASE("LU solve leaves tiny residuals") {
    CMat m(3);
    const double vals[9] = {4.0, 1.0, -2.0, 1.0, 5.0, 1.0, -1.0, 2.0, 6.0};
    for (int i = 0; i < 9; ++i) m.a[i] = vals[i];
    const std::vector<cd> b = {cd(1.0, 1.0), cd(0.0, -2.0), cd(3.0, 0.5)};
    std::vector<cd> x = b;
    solve_lu(m, x);
    for (int i = 0; i < 3; ++i) {
        cd r = 0.0;
        for (int j = 0; j < 3; ++j) r += m(i, j) * x[j];
        CHECK(std::abs(r - b[i]) < 1e-13);
    }
}

TEST_CASE("LU solve rejects a singular matrix") {
    CMat m(2);
    m(0, 0) = 1.0;
    m(0, 1) = 2.0;
    m(1, 0) = 2.0;
    m(1, 1) = 4.0;
    std::vector<cd> b = {1.0, 1.0};
    CHECK_THROWS_AS(solve_lu(m, b), numeric_error);
}

TEST_CASE("one-norm returns the maximum column sum") {
    CMat m(2);
    m(0, 0) = cd(3.0, 4.0); // |.| = 5
    m(1, 0) = -2.0;
    m(0, 1) = 1.0;
    m(1, 1) = cd(0.0, 1.5);
    CHECK(norm_1(m) == doctest::Approx(7.0).epsilon(1e-15));
}

TEST_CASE("cubic eigenvalue solver satisfies the characteristic polynomial") {
    // Generator-style matrix plus diagonal perturbations of the kind
    // produced by the Laplace-transform argument.
    for (const cd z : {cd(0.0, 0.0), cd(-3.0, 0.0), cd(2.0, 5.0), cd(-40.0, 12.0)}) {
        CMat m = generator_times(1.0);
        m(0, 0) += z * 0.3;
        m(1, 1) += z * 0.6;
        m(2, 2) += z * 0.9;

        cd w[3];
        eigenvalues_3(m, w);

        const cd tr = m(0, 0) + m(1, 1) + m(2, 2);
        const cd dt = det3(m);
        const double scale = std::max(1.0, norm_1(m));
        CHECK(std::abs(w[0] + w[1] + w[2] - tr) < 1e-11 * scale);
        CHECK(std::abs(w[0] * w[1] * w[2] - dt) < 1e-10 * scale * scale * scale);
        for (int i = 0; i < 3; ++i) {
            CMat shifted = m;
            for (int d = 0; d < 3; ++d) shifted(d, d) -= w[i];
            CHECK(std::abs(det3(shifted)) < 1e-9 * scale * scale * scale);
        }
    }
}

TEST_CASE("quadratic eigenvalue solver satisfies trace and determinant") {
    const cd m[4] = {cd(-1.0, 2.0), cd(0.5, 0.0), cd(0.25, -1.0), cd(3.0, -4.0)};
    cd w[2];
    eigenvalues_2(m, w);
    CHECK(std::abs(w[0] + w[1] - (m[0] + m[3])) < 1e-12);
    CHECK(std::abs(w[0] * w[1] - (m[0] * m[3] - m[1] * m[2])) < 1e-11);
}

TEST_CASE("matrix product against hand-computed entries") {
    CMat a(2), b(2);
    a(0, 0) = 1.0;
    a(0, 1) = cd(0.0, 1.0);
    a(1, 0) = 2.0;
    a(1, 1) = -1.0;
    b(0, 0) = 3.0;
    b(0, 1) = 1.0;
    b(1, 0) = cd(0.0, -2.0);
    b(1, 1) = 4.0;
    const CMat p = a * b;
    CHECK(std::abs(p(0, 0) - (3.0 + cd(0.0, 1.0) * cd(0.0, -2.0))) < 1e-15);
    CHECK(std::abs(p(0, 1) - (1.0 + cd(0.0, 4.0))) < 1e-15);
    CHECK(std::abs(p(1, 0) - (6.0 + cd(0.0, 2.0))) < 1e-15);
    CHECK(std::abs(p(1, 1) - (2.0 - 4.0)) < 1e-15);
}
