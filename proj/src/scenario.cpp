#include "scenario.hpp"

#include <cmath>
#include <random>

#include "errors.hpp"

namespace emdtn {

void Scenario::build() {
    if (!(mu.value().real() > 0.0) || std::abs(mu.value().imag()) > 1e-12)
        throw NonPositiveParameter("mu(0) must be real and positive");
    if (!(sigma.value().real() > 0.0)) throw NonPositiveParameter("Re sigma(0) must be positive");
    metric = build_metric(g);  // throws NonPositiveDefinite
    if (order != metric.order) order = metric.order;
    gamma = christoffel(metric);
    curv = curvature(metric, gamma);
    auto q = std::make_shared<QContext>();
    q->order = order;
    q->up11 = metric.up[0][0];
    q->up12 = metric.up[0][1];
    q->up22 = metric.up[1][1];
    q->up11_inv = jet_inv(q->up11);
    ctx = std::move(q);
    mu_inv = jet_inv(mu);
    sigma_inv = jet_inv(sigma);
}

Scenario make_flat_scenario(int order, int depth, double omega, Cplx sigma0, double mu0) {
    Scenario s;
    s.omega = omega;
    s.order = order;
    s.depth = depth;
    s.g.g11 = Jet3::constant(order, 1.0);
    s.g.g12 = Jet3::constant(order, 0.0);
    s.g.g22 = Jet3::constant(order, 1.0);
    s.mu = Jet3::constant(order, mu0);
    s.sigma = Jet3::constant(order, sigma0);
    s.build();
    return s;
}

namespace {

// mt19937_64 is fully specified by the standard, and we derive uniforms from
// raw draws directly, so scenarios are reproducible across platforms.
double uniform_pm(std::mt19937_64& rng, double half_width) {
    const double u = double(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    return (2.0 * u - 1.0) * half_width;
}

Jet3 random_jet(std::mt19937_64& rng, int order, bool complex_coeffs, Cplx center) {
    Jet3 j(order);
    for (int k3 = 0; k3 <= order; ++k3) {
        for (int k2 = 0; k2 + k3 <= order; ++k2) {
            for (int k1 = 0; k1 + k2 + k3 <= order; ++k1) {
                const int total = k1 + k2 + k3;
                double fact = 1.0;
                for (int i = 2; i <= total + 1; ++i) fact *= i;
                const double scale = 1.0 / fact;
                double re = uniform_pm(rng, 0.3) * scale;
                double im = complex_coeffs ? uniform_pm(rng, 0.3) * scale : 0.0;
                j.set(k1, k2, k3, Cplx(re, im));
            }
        }
    }
    j.set(0, 0, 0, center + j.at(0, 0, 0));
    return j;
}

}  // namespace

Scenario make_random_scenario(std::uint64_t seed, int order, int depth, bool complex_sigma) {
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
        Scenario s;
        s.omega = 1.0 + 0.5 * (double(rng() >> 11) * 0x1.0p-53);
        s.order = order;
        s.depth = depth;
        s.seed = seed;
        s.g.g11 = random_jet(rng, order, false, Cplx(1.0));
        s.g.g12 = random_jet(rng, order, false, Cplx(0.0));
        s.g.g22 = random_jet(rng, order, false, Cplx(1.0));
        s.mu = random_jet(rng, order, false, Cplx(1.0));
        s.sigma = random_jet(rng, order, complex_sigma, Cplx(1.0));
        const double g11 = s.g.g11.value().real();
        const double det = g11 * s.g.g22.value().real() - std::norm(s.g.g12.value());
        if (!(g11 > 0.05) || !(det > 0.05)) continue;
        if (!(s.mu.value().real() > 0.05) || !(s.sigma.value().real() > 0.05)) continue;
        s.build();
        return s;
    }
    throw Error("make_random_scenario: rejection sampling failed");
}

}  // namespace emdtn
