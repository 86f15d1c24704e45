#pragma once

// The inverse direction: from the DtN symbol table psi, recover the boundary
// jets of the metric (metric mode) or of mu and sigma (parameter mode) by
// layer stripping, one normal-derivative order per symbol degree.
//
// The strategy is residual layer stripping: at each order the forward engine
// is re-run with the current state and the not-yet-recovered coefficients set
// to zero; the difference between measured and candidate symbol slots then
// isolates the new unknowns, which enter linearly. Tangential derivatives of
// recovered quantities are themselves recovered level by level from the
// tangential jets of the same slots, so that later (deeper) layers see a
// complete state.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "dtn.hpp"

namespace emdtn {

struct ReconOptions {
    double forward_tol = 1e-6;       // per-order forward-mismatch threshold (relative)
    double consistency_tol = 1e-6;   // over-determined design residual (relative)
    double degenerate_margin = 1e-6; // |det| floor for the parameter 2x2 system
    int max_order = -1;              // -1: recover everything the table supports
    int jobs = 1;                    // parallel forward runs inside a layer
    // Covectors for quadratic-form identification (metric trace kernels).
    std::array<std::array<double, 2>, 4> quad_design{{{1, 0}, {0, 1}, {1, 1}, {2, 1}}};
    // Covectors for the principal-symbol step (need xi1 xi2 != 0).
    std::array<std::array<double, 2>, 4> principal_design{{{1, 1}, {1, -1}, {2, 1}, {1, 2}}};
};

// Evaluated measurement data: the psi table restricted to the boundary, and
// the unmixed L table once the boundary metric and mu are available.
struct MeasuredSymbols {
    SymbolTable psi;
    SymbolTable L;
    bool has_L = false;

    int lowest() const { return psi.lowest(); }
    // 2x2 matrix of tangential jets of a slot at a covector.
    std::array<Jet3, 4> eval_psi(int degree, double xi1, double xi2) const;
    std::array<Jet3, 4> eval_L(int degree, double xi1, double xi2) const;
};

MeasuredSymbols make_measured(SymbolTable psi);

struct ReconstructionState {
    int order = 0;  // jet truncation of the recovered jets
    double omega = 1.0;
    // metric mode: recovered inverse metric (full 3D jets, stacked orders)
    Jet3 up11, up12, up22;
    // parameter mode: mu jet and sigma = sigma0 * t with t(0) = 1
    Jet3 mu, t;
    Cplx sigma0{1.0, 0.0};
    bool sigma0_known = false;

    int orders_done = -1;     // highest processed normal order (0 = boundary data)
    // Highest order whose recovered values are individually determined by
    // the data. Falls below orders_done when sigma(0) had to be frozen:
    // the deeper orders are then only a measurement-consistent
    // representative of the unidentifiable family.
    int trusted_orders = -1;
    std::map<int, double> order_residual;
    std::vector<std::string> log;

    Jet3 sigma() const { return sigma0 * t; }
    // covariant metric jets from the recovered inverse block
    void covariant(Jet3& g11, Jet3& g12, Jet3& g22) const;
};

// Principal-symbol step, metric mode: from the tangential jets of psi_1^{11}
// recover |g| g^{ab}, split off |g| via the determinant, and return the
// boundary tangential jets of g^{ab}.
ReconstructionState recover_principal_metric(const MeasuredSymbols& measured, double omega, const Jet3& mu_boundary,
                                             int order, const ReconOptions& opts = {});

// Principal-symbol step, parameter mode: invert the same closed form for mu.
Jet3 recover_principal_mu(const MeasuredSymbols& measured, double omega, const Jet3& g11, const Jet3& g12,
                          const Jet3& g22, const ReconOptions& opts = {});

// One metric layer: recovers the order-m normal derivatives of g^{ab}
// (all tangential levels needed by later layers). The measured object must
// have its L table attached.
void recover_metric_order(ReconstructionState& state, const MeasuredSymbols& measured, const Jet3& mu,
                          const Jet3& sigma, int m, int tangential_levels, const ReconOptions& opts = {});

// Full metric-mode reconstruction.
ReconstructionState reconstruct_metric(const SymbolTable& psi, double omega, const Jet3& mu, const Jet3& sigma,
                                       const ReconOptions& opts = {});

// Full parameter-mode reconstruction (g known).
ReconstructionState reconstruct_parameters(const SymbolTable& psi, double omega, const Jet3& g11, const Jet3& g12,
                                           const Jet3& g22, const ReconOptions& opts = {});

// Closed trace inversions pinned by the layer-stripping displays:
//   order 1:  k = 7 h^{ab} - 11 h g^{ab},  h = -(1/15) sum g_ab k^{ab}
//   order >1: k = 7 u^{ab} + h g^{ab},     h = (1/9) sum g_ab k^{ab}
// Returns the recovered symmetric form (u11, u12, u22).
std::array<Cplx, 3> invert_trace_form(const std::array<Cplx, 3>& k, const std::array<Cplx, 3>& g_lo,
                                      const std::array<Cplx, 3>& g_up, int order);

// Scalar prefactor of the trace kernel at order m:
//   (2 sqrt(Q))^{1-m} / (4 Q).
double trace_kernel_prefactor(int m, double q0);

}  // namespace emdtn
