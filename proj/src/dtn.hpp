#pragma once

// Assembly of the Dirichlet-to-Neumann symbol tables L, Lambda and psi from
// the factorization symbols, and application of the truncated psi as a
// Fourier multiplier on sampled tangential boundary data.

#include <string>

#include "factor.hpp"

namespace emdtn {

struct DtnTables {
    SymbolTable L;       // 2x2, top degree 1
    SymbolTable Lambda;  // 2x2
    SymbolTable psi;     // 2x2, restricted to x3 = 0
};

// L^{jk} = Phi^{jk} - Phi^{j3} o Y_k + sum_a g^{aj} (d_a Y_k + Y_k i xi_a)
//        + sum_a g^{aj} d3 g_{ak},
// with Y_k = Q o [sigma (d_k + Phi^{3k} + tr Gamma_k) + d_k sigma].
SymbolTable assemble_L(const SymbolTable& phi, const SymbolTable& q, const Scenario& s, int lowest_degree);

// Lambda = (1/(i omega mu sqrt|g|)) L o G, G the tangential mixing matrix;
// psi is Lambda traced at x3 = 0.
DtnTables assemble_Lambda_psi(SymbolTable L, const Scenario& s);

// Inverse of the mixing step: recovers L from Lambda given the boundary
// (tangential) jets of mu and the metric. Used by the tests and the
// reconstruction, which must work from measured psi.
SymbolTable dtn_unmix(const SymbolTable& lambda, double omega, const Jet3& mu, const Jet3& lo11, const Jet3& lo12,
                      const Jet3& lo22, int out_lowest);

// Runs the whole forward pipeline at the scenario's depth.
struct ForwardTables {
    SymbolTable phi, q, L, Lambda, psi;
};
ForwardTables forward_pipeline(const Scenario& s);

struct BoundaryField {
    std::size_t n1 = 0, n2 = 0;          // grid over [0,2pi)^2, power-of-two sides
    std::vector<Cplx> a, b;              // two tangential components, row-major
};

// Frequencies of mode index i on a side of length n: i <= n/2 ? i : i - n.
int grid_frequency(std::size_t i, std::size_t n);

// Discrete Fourier multiplier: each nonzero mode is multiplied by
// sum_d table_d(x0, xi'); the zero mode maps to zero (homogeneous symbols
// have no distributional value at xi' = 0 and no delta correction is added).
// depth = number of degree slots used, starting at the table top.
BoundaryField apply_dtn(const SymbolTable& table, const BoundaryField& f, int depth, int jobs = 1);

void save_field(const std::string& path, const BoundaryField& f);
BoundaryField load_field(const std::string& path);

}  // namespace emdtn
