#pragma once

// Small dense complex solvers used by the tests and the reconstruction:
// partial-pivot LU for square systems and Householder QR least squares for
// the (slightly) overdetermined design-covector systems. Sizes here are tiny
// (a few dozen unknowns at most).

#include <complex>
#include <vector>

namespace emdtn {

using Cplx = std::complex<double>;

struct Matrix {
    int rows = 0, cols = 0;
    std::vector<Cplx> a;  // row-major

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, Cplx(0.0)) {}
    Cplx& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    Cplx operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

// Solve A x = b (square). Throws DesignSingular on (near-)singular pivots.
std::vector<Cplx> solve_dense(Matrix A, std::vector<Cplx> b);

// Least squares min ||A x - b||_2, rows >= cols. Returns x; if
// residual_out is non-null, stores the 2-norm of the residual.
std::vector<Cplx> solve_least_squares(Matrix A, std::vector<Cplx> b, double* residual_out = nullptr);

}  // namespace emdtn
