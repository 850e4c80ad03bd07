#pragma once

#include <complex>
#include <vector>

#include "cobro/errors.hpp"

namespace cobro {

using cd = std::complex<double>;

// Dense row-major complex matrix, sized for small state spaces
// (regime chains have a handful of states, not thousands).
struct CMat {
    int n = 0;
    std::vector<cd> a; // n*n, row-major

    CMat() = default;
    explicit CMat(int n_) : n(n_), a(static_cast<size_t>(n_) * n_) {}

    cd& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    const cd& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

    static CMat identity(int n);
};

CMat operator*(const CMat& x, const CMat& y);
CMat operator+(const CMat& x, const CMat& y);
CMat operator-(const CMat& x, const CMat& y);
CMat scale(const CMat& x, cd s);

// max column sum of absolute values
double norm_1(const CMat& m);

// Solve a x = b in place (Gaussian elimination, partial pivoting).
// b holds the solution on return.  Throws numeric_error on singularity.
void solve_lu(CMat a, std::vector<cd>& b);

// Solve a X = B column-by-column; B row-major n x n.
void solve_lu_mat(const CMat& a, CMat& b);

// Matrix exponential, degree-13 Pade approximant with scaling and squaring.
// Accurate to ~1e-13 relative for moderate norms; handles any finite input.
CMat expm(const CMat& m);

// Eigenvalues of a complex 2x2 / 3x3 matrix in closed form (row-major
// storage).  The 3x3 solver uses Cardano's formula; roots come in no
// particular order.  Raw-pointer forms are allocation-free for hot loops.
void eigenvalues_2(const cd* m, cd w[2]);
void eigenvalues_3(const cd* m, cd w[3]);
inline void eigenvalues_2(const CMat& m, cd w[2]) { eigenvalues_2(m.a.data(), w); }
inline void eigenvalues_3(const CMat& m, cd w[3]) { eigenvalues_3(m.a.data(), w); }

} // namespace cobro
