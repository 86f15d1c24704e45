#include "linalg.hpp"

#include <cassert>
#include <cmath>

#include "errors.hpp"

namespace emdtn {

std::vector<Cplx> solve_dense(Matrix A, std::vector<Cplx> b) {
    const int n = A.rows;
    assert(A.cols == n && static_cast<int>(b.size()) == n);
    double scale = 0.0;
    for (const auto& v : A.a) scale = std::max(scale, std::abs(v));
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(A(k, k));
        for (int i = k + 1; i < n; ++i) {
            if (std::abs(A(i, k)) > best) {
                best = std::abs(A(i, k));
                piv = i;
            }
        }
        if (best <= 1e-14 * std::max(scale, 1e-300)) throw DesignSingular("solve_dense: matrix is singular to working precision");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const Cplx f = A(i, k) / A(k, k);
            if (f == Cplx(0.0)) continue;
            for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<Cplx> x(n);
    for (int i = n - 1; i >= 0; --i) {
        Cplx s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return x;
}

std::vector<Cplx> solve_least_squares(Matrix A, std::vector<Cplx> b, double* residual_out) {
    const int m = A.rows, n = A.cols;
    assert(m >= n && static_cast<int>(b.size()) == m);
    // Householder QR, complex reflectors.
    for (int k = 0; k < n; ++k) {
        double norm = 0.0;
        for (int i = k; i < m; ++i) norm += std::norm(A(i, k));
        norm = std::sqrt(norm);
        if (norm <= 1e-300) throw DesignSingular("solve_least_squares: rank-deficient design");
        const Cplx akk = A(k, k);
        const double aabs = std::abs(akk);
        const Cplx phase = aabs > 0.0 ? akk / aabs : Cplx(1.0);
        const Cplx alpha = -phase * norm;
        // v = x - alpha e_k, stored in place of column k below the diagonal.
        A(k, k) = akk - alpha;
        double vnorm2 = 0.0;
        for (int i = k; i < m; ++i) vnorm2 += std::norm(A(i, k));
        if (vnorm2 <= 1e-300) throw DesignSingular("solve_least_squares: degenerate reflector");
        for (int j = k + 1; j < n; ++j) {
            Cplx dot(0.0);
            for (int i = k; i < m; ++i) dot += std::conj(A(i, k)) * A(i, j);
            const Cplx f = 2.0 * dot / vnorm2;
            for (int i = k; i < m; ++i) A(i, j) -= f * A(i, k);
        }
        Cplx dot(0.0);
        for (int i = k; i < m; ++i) dot += std::conj(A(i, k)) * b[i];
        const Cplx f = 2.0 * dot / vnorm2;
        for (int i = k; i < m; ++i) b[i] -= f * A(i, k);
        A(k, k) = alpha;  // R diagonal
    }
    std::vector<Cplx> x(n);
    for (int i = n - 1; i >= 0; --i) {
        Cplx s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        if (std::abs(A(i, i)) <= 1e-300) throw DesignSingular("solve_least_squares: zero pivot");
        x[i] = s / A(i, i);
    }
    if (residual_out != nullptr) {
        double r = 0.0;
        for (int i = n; i < m; ++i) r += std::norm(b[i]);
        *residual_out = std::sqrt(r);
    }
    return x;
}

}  // namespace emdtn
