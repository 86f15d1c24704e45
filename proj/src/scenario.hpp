#pragma once

// A complete problem instance: frequency, boundary metric jet, mu and sigma
// jets, truncation orders, plus everything derived from them that the
// forward pipeline reuses (inverse metric, Christoffel symbols, curvature,
// the symbol-algebra context).

#include <cstdint>
#include <optional>

#include "geometry.hpp"
#include "symalg.hpp"

namespace emdtn {

struct Scenario {
    double omega = 1.0;
    int order = 6;  // jet truncation N
    int depth = 4;  // number of psi degree slots (psi down to degree 2 - depth)
    std::optional<std::uint64_t> seed;

    BoundaryMetricJet g;
    Jet3 mu, sigma;

    // derived
    MetricData metric;
    ChristoffelJet gamma;
    CurvatureJet curv;
    Ctx ctx;
    Jet3 mu_inv, sigma_inv;

    // Validates the standing assumptions (positive definite g, mu(0) > 0,
    // Re sigma(0) > 0) and builds the derived data. Throws
    // NonPositiveDefinite / NonPositiveParameter.
    void build();

    int phi_lowest() const { return 1 - depth; }
    int q_lowest() const { return -depth; }
    int l_lowest() const { return 2 - depth; }
};

Scenario make_flat_scenario(int order = 6, int depth = 4, double omega = 1.0, Cplx sigma0 = Cplx(1.0),
                            double mu0 = 1.0);

// Random admissible scenario: coefficients uniform in [-0.3, 0.3] scaled by
// 1/(1 + |k|)! around g = I, mu = sigma = 1, rejection-sampled against the
// positivity invariants. Deterministic for a given seed.
Scenario make_random_scenario(std::uint64_t seed, int order = 6, int depth = 4, bool complex_sigma = true);

}  // namespace emdtn
