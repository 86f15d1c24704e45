#pragma once

// Riemannian tensor calculus in boundary normal coordinates: the metric has
// block form g_{a3} = 0, g_33 = 1, so only the 2x2 tangential block carries
// jets. Indices run 0..2 internally for coordinates x1..x3.

#include <array>

#include "jets.hpp"

namespace emdtn {

struct BoundaryMetricJet {
    Jet3 g11, g12, g22;
};

struct VectorFieldJet {
    std::array<Jet3, 3> X;
};

struct ChristoffelJet {
    // G[j][l][k] = Gamma^j_{lk}, symmetric in (l, k).
    Jet3 G[3][3][3];
};

struct CurvatureJet {
    Jet3 riem[3][3][3][3];  // R^j_{klm}
    Jet3 ricci[3][3];       // R_{km}
    Jet3 mixed[3][3];       // R^j_k = g^{jm} R_{mk}
};

// Full 3x3 metric data derived from the boundary block. Validates positive
// definiteness at the base point.
struct MetricData {
    Jet3 lo[3][3];
    Jet3 up[3][3];
    Jet3 det2;       // det of the tangential block = det of g
    Jet3 sqrt_det;   // sqrt(|g|)
    Jet3 inv_sqrt_det;
    int order = 0;
};

MetricData build_metric(const BoundaryMetricJet& g);

ChristoffelJet christoffel(const MetricData& m);
CurvatureJet curvature(const MetricData& m, const ChristoffelJet& gamma);

VectorFieldJet grad(const MetricData& m, const Jet3& f);
Jet3 divergence(const MetricData& m, const VectorFieldJet& x);
VectorFieldJet curl(const MetricData& m, const VectorFieldJet& x);
Jet3 laplace_beltrami(const MetricData& m, const Jet3& f);

// The two printed determinant forms of the vector product; they agree
// coefficient-wise and the tests pin that.
VectorFieldJet cross_contravariant(const MetricData& m, const VectorFieldJet& e, const VectorFieldJet& f);
VectorFieldJet cross_covariant(const MetricData& m, const VectorFieldJet& e, const VectorFieldJet& f);

// a_{jk} = sum_{l,m} g^{ml} (d_l Gamma^j_{km} + Gamma^j_{hl} Gamma^h_{km}
//                            - Gamma^j_{kh} Gamma^h_{ml})
Jet3 connection_block(const MetricData& m, const ChristoffelJet& gamma, int j, int k);

// curl curl X - [grad div X - (vector-Laplacian bundle)]; all components of
// the result vanish at the valid truncation order.
VectorFieldJet curl_curl_identity_residual(const MetricData& m, const ChristoffelJet& gamma, const CurvatureJet& curv,
                                           const VectorFieldJet& x);

// curl curl E - (grad mu / mu) x curl E - w2 mu sigma E, the second-order
// form of Maxwell's equations for the electric field.
VectorFieldJet maxwell_second_order(const MetricData& m, const Jet3& mu, const Jet3& sigma, double omega,
                                    const VectorFieldJet& e);

// -grad( (1/sigma) sum_l d_l(sigma) E^l ), the substitution for grad div E
// that div(sigma E) = 0 provides on Maxwell solutions.
VectorFieldJet grad_div_substitution(const MetricData& m, const Jet3& sigma, const VectorFieldJet& e);

// Classical dyadic Green's function for constant mu, sigma on flat space:
// [I + grad_y grad_y / (w2 mu sigma)] e^{i w sqrt(mu sigma) |y-x|} / (4 pi |y-x|).
std::array<std::array<Cplx, 3>, 3> classical_dyadic_green(double omega, double mu, Cplx sigma,
                                                          const std::array<double, 3>& x,
                                                          const std::array<double, 3>& y);

}  // namespace emdtn
