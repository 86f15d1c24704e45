#include <doctest.h>

#include <cmath>
#include <random>

#include "geometry.hpp"
#include "scenario.hpp"
#include "test_util.hpp"

using namespace emdtn;
using testutil::random_jet;

namespace {

BoundaryMetricJet random_metric(std::mt19937_64& rng, int order) {
    BoundaryMetricJet g;
    g.g11 = random_jet(rng, order, false, Cplx(1.0));
    g.g12 = random_jet(rng, order, false, Cplx(0.0));
    g.g22 = random_jet(rng, order, false, Cplx(1.0));
    return g;
}

VectorFieldJet random_field(std::mt19937_64& rng, int order) {
    VectorFieldJet x;
    for (int j = 0; j < 3; ++j) x.X[j] = random_jet(rng, order);
    return x;
}

BoundaryMetricJet flat_metric(int order) {
    BoundaryMetricJet g;
    g.g11 = Jet3::constant(order, 1.0);
    g.g12 = Jet3::constant(order, 0.0);
    g.g22 = Jet3::constant(order, 1.0);
    return g;
}

double field_max_abs(const VectorFieldJet& x) {
    double m = 0.0;
    for (const auto& c : x.X) m = std::max(m, c.max_abs());
    return m;
}

}  // namespace

TEST_CASE("inverse metric: flat, constant diagonal, and random self-consistency") {
    const MetricData flat = build_metric(flat_metric(4));
    CHECK(flat.up[0][0].value() == Cplx(1.0));
    CHECK(flat.up[0][1].max_abs() == 0.0);
    CHECK(flat.det2.value() == Cplx(1.0));

    BoundaryMetricJet gd = flat_metric(4);
    gd.g11 = Jet3::constant(4, 2.0);
    const MetricData md = build_metric(gd);
    CHECK(std::abs(md.up[0][0].value() - Cplx(0.5)) < 1e-15);
    CHECK(std::abs(md.det2.value() - Cplx(2.0)) < 1e-15);

    std::mt19937_64 rng(3);
    const MetricData m = build_metric(random_metric(rng, 5));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Jet3 s(5);
            for (int c = 0; c < 2; ++c) s += m.up[a][c] * m.lo[c][b];
            if (a == b) s.set(0, 0, 0, s.value() - Cplx(1.0));
            CHECK(s.max_abs() < 1e-12);
        }

    BoundaryMetricJet bad = flat_metric(3);
    bad.g11 = Jet3::constant(3, -1.0);
    CHECK_THROWS_AS((void)build_metric(bad), NonPositiveDefinite);
}

TEST_CASE("christoffel: flat vanishes; hand-computed slope metric") {
    const MetricData flat = build_metric(flat_metric(4));
    const ChristoffelJet cf = christoffel(flat);
    double m = 0.0;
    for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l)
            for (int k = 0; k < 3; ++k) m = std::max(m, cf.G[j][l][k].max_abs());
    CHECK(m == 0.0);

    // g11 = 1 + 2 x3: Gamma^1_{13} = (1+2x3)^{-1}, Gamma^3_{11} = -1
    BoundaryMetricJet g = flat_metric(4);
    g.g11 = Jet3::constant(4, 1.0);
    g.g11.set(0, 0, 1, 2.0);
    const MetricData md = build_metric(g);
    const ChristoffelJet c = christoffel(md);
    CHECK(std::abs(c.G[0][0][2].at(0, 0, 0) - Cplx(1.0)) < 1e-14);
    CHECK(std::abs(c.G[0][0][2].at(0, 0, 1) - Cplx(-2.0)) < 1e-14);
    CHECK(std::abs(c.G[0][0][2].at(0, 0, 2) - Cplx(4.0)) < 1e-14);
    CHECK(std::abs(c.G[2][0][0].at(0, 0, 0) - Cplx(-1.0)) < 1e-14);
    CHECK(c.G[2][0][0].at(0, 0, 1) == Cplx(0.0));

    // normal-coordinate identities Gamma^3_{3k} = Gamma^k_{33} = 0
    for (int k = 0; k < 3; ++k) {
        CHECK(c.G[2][2][k].max_abs() == 0.0);
        CHECK(c.G[k][2][2].max_abs() == 0.0);
    }
}

TEST_CASE("christoffel trace identity d_k sqrt|g| / sqrt|g| = sum Gamma^l_{kl}") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 3; ++rep) {
        const MetricData m = build_metric(random_metric(rng, 5));
        const ChristoffelJet c = christoffel(m);
        for (int k = 0; k < 3; ++k) {
            Jet3 lhs = m.inv_sqrt_det * jet_diff(m.sqrt_det, k + 1);
            Jet3 rhs = c.G[0][k][0] + c.G[1][k][1] + c.G[2][k][2];
            CHECK(max_abs_diff(lhs, rhs) < 1e-10);
        }
    }
}

TEST_CASE("curvature: flat zero; warped product closed form; Bianchi and symmetry") {
    const MetricData flat = build_metric(flat_metric(4));
    const CurvatureJet cz = curvature(flat, christoffel(flat));
    double m = 0.0;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) m = std::max(m, cz.ricci[j][k].max_abs());
    CHECK(m == 0.0);

    // g11 = g22 = (1+x3)^2: R^1_{212} = -1, Ricci_11 = Ricci_22 = -1, Ricci_33 = 0
    BoundaryMetricJet g = flat_metric(5);
    Jet3 f(5);
    f.set(0, 0, 0, 1.0);
    f.set(0, 0, 1, 2.0);
    f.set(0, 0, 2, 1.0);
    g.g11 = f;
    g.g22 = f;
    const MetricData md = build_metric(g);
    const CurvatureJet cv = curvature(md, christoffel(md));
    CHECK(std::abs(cv.riem[0][1][0][1].value() - Cplx(-1.0)) < 1e-12);
    CHECK(std::abs(cv.ricci[0][0].value() - Cplx(-1.0)) < 1e-12);
    CHECK(std::abs(cv.ricci[1][1].value() - Cplx(-1.0)) < 1e-12);
    CHECK(cv.ricci[2][2].max_abs() < 1e-12);

    std::mt19937_64 rng(7);
    const MetricData mr = build_metric(random_metric(rng, 5));
    const CurvatureJet cr = curvature(mr, christoffel(mr));
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
                for (int mm = 0; mm < 3; ++mm) {
                    // antisymmetry in the last pair
                    CHECK(max_abs_diff(cr.riem[j][k][l][mm], -cr.riem[j][k][mm][l]) < 1e-10);
                    // first Bianchi identity
                    Jet3 b = cr.riem[j][k][l][mm] + cr.riem[j][l][mm][k] + cr.riem[j][mm][k][l];
                    CHECK(b.max_abs() < 1e-10);
                }
    for (int k = 0; k < 3; ++k)
        for (int mm = 0; mm < 3; ++mm) CHECK(max_abs_diff(cr.ricci[k][mm], cr.ricci[mm][k]) < 1e-10);
}

TEST_CASE("vector operators: Euclidean checks") {
    const MetricData flat = build_metric(flat_metric(4));
    VectorFieldJet x;
    x.X[0] = Jet3::variable(4, 2);               // x2
    x.X[1] = Cplx(-1.0) * Jet3::variable(4, 1);  // -x1
    x.X[2] = Jet3::constant(4, 0.0);
    const VectorFieldJet c = curl(flat, x);
    CHECK(c.X[0].max_abs() == 0.0);
    CHECK(c.X[1].max_abs() == 0.0);
    CHECK(std::abs(c.X[2].value() - Cplx(-2.0)) < 1e-15);

    Jet3 f(4);
    f.set(2, 0, 0, 1.0);  // x1^2
    const Jet3 lap = laplace_beltrami(flat, f);
    CHECK(std::abs(lap.value() - Cplx(2.0)) < 1e-15);
    Jet3 rest = lap;
    rest.set(0, 0, 0, 0.0);
    CHECK(rest.max_abs() < 1e-15);
}

TEST_CASE("div curl = 0 and curl grad = 0 for random data") {
    std::mt19937_64 rng(37);
    for (int rep = 0; rep < 3; ++rep) {
        const MetricData m = build_metric(random_metric(rng, 5));
        const VectorFieldJet x = random_field(rng, 5);
        CHECK(divergence(m, curl(m, x)).max_abs() < 1e-10);
        const Jet3 f = random_jet(rng, 5);
        CHECK(field_max_abs(curl(m, grad(m, f))) < 1e-10);
    }
}

TEST_CASE("the two vector product forms agree") {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 3; ++rep) {
        const MetricData m = build_metric(random_metric(rng, 5));
        const VectorFieldJet e = random_field(rng, 5);
        const VectorFieldJet f = random_field(rng, 5);
        const VectorFieldJet a = cross_contravariant(m, e, f);
        const VectorFieldJet b = cross_covariant(m, e, f);
        for (int j = 0; j < 3; ++j) CHECK(max_abs_diff(a.X[j], b.X[j]) < 1e-11);
    }
}

TEST_CASE("curl curl identity") {
    // flat: both sides reduce to the componentwise vector Laplacian
    const MetricData flat = build_metric(flat_metric(5));
    std::mt19937_64 rng(43);
    {
        const ChristoffelJet c = christoffel(flat);
        const CurvatureJet cv = curvature(flat, c);
        const VectorFieldJet x = random_field(rng, 5);
        CHECK(field_max_abs(curl_curl_identity_residual(flat, c, cv, x)) < 1e-13);
    }
    // stated slope example
    {
        BoundaryMetricJet g = flat_metric(5);
        g.g11 = Jet3::constant(5, 1.0);
        g.g11.set(0, 0, 1, 1.0);
        const MetricData m = build_metric(g);
        const ChristoffelJet c = christoffel(m);
        const CurvatureJet cv = curvature(m, c);
        VectorFieldJet x;
        x.X[0] = Jet3::constant(5, 1.0);
        x.X[1] = Jet3::constant(5, 0.0);
        x.X[2] = Jet3::constant(5, 0.0);
        CHECK(field_max_abs(curl_curl_identity_residual(m, c, cv, x)) < 1e-9);
    }
    // random metric and field at N = 4
    for (int rep = 0; rep < 3; ++rep) {
        const MetricData m = build_metric(random_metric(rng, 4));
        const ChristoffelJet c = christoffel(m);
        const CurvatureJet cv = curvature(m, c);
        const VectorFieldJet x = random_field(rng, 4);
        CHECK(field_max_abs(curl_curl_identity_residual(m, c, cv, x)) < 1e-9);
    }
}

TEST_CASE("classical dyadic Green's function") {
    // scalar factor at w2 mu sigma = 1, |y-x| = 1: g = e^{i}/(4 pi)
    {
        const std::array<double, 3> x{0.0, 0.0, 0.0}, y{1.0, 0.0, 0.0};
        const auto G = classical_dyadic_green(1.0, 1.0, Cplx(1.0), x, y);
        const Cplx g = std::exp(Cplx(0.0, 1.0)) / (4.0 * M_PI);  // e^{i}/(4 pi)
        const Cplx i(0.0, 1.0);
        // kR = 1: transverse entry g (1 + i/(kR) - 1/(kR)^2) = i g,
        //          longitudinal entry g (1 + (i - 1)^2 + 1) = (2 - 2i) g.
        CHECK(std::abs(G[1][1] - i * g) < 1e-12);
        CHECK(std::abs(G[2][2] - i * g) < 1e-12);
        CHECK(std::abs(G[0][0] - (2.0 - 2.0 * i) * g) < 1e-12);
        CHECK(std::abs(G[0][1]) < 1e-14);
    }
    // reciprocity G(x,y)^T = G(y,x)
    std::mt19937_64 rng(47);
    auto rnd = [&] { return testutil::uniform_pm(rng, 1.0); };
    for (int rep = 0; rep < 5; ++rep) {
        const std::array<double, 3> x{rnd(), rnd(), rnd()};
        const std::array<double, 3> y{x[0] + 1.0 + rnd() * 0.3, x[1] + rnd(), x[2] + rnd()};
        const auto Gxy = classical_dyadic_green(1.3, 1.1, Cplx(0.9, 0.2), x, y);
        const auto Gyx = classical_dyadic_green(1.3, 1.1, Cplx(0.9, 0.2), y, x);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(std::abs(Gxy[i][j] - Gyx[j][i]) < 1e-10);
    }
    // curl curl G - w2 mu sigma G = 0 away from the source (finite differences)
    const double omega = 1.2, mu = 1.0;
    const Cplx sigma(1.1, 0.3);
    const Cplx k2 = omega * omega * mu * sigma;
    const std::array<double, 3> y{0.1, -0.2, 0.05};
    const double h = 1e-3;
    for (int rep = 0; rep < 3; ++rep) {
        std::array<double, 3> x{1.1 + 0.2 * rnd(), 0.4 * rnd(), 0.3 * rnd()};
        auto evalG = [&](const std::array<double, 3>& p) { return classical_dyadic_green(omega, mu, sigma, p, y); };
        // curl acting on columns, then curl again, via central differences
        auto curl_num = [&](auto&& field, const std::array<double, 3>& p, int col) {
            std::array<Cplx, 3> out;
            auto at = [&](int axis, double delta, int row) {
                std::array<double, 3> q = p;
                q[axis] += delta;
                return field(q)[row][col];
            };
            out[0] = (at(1, h, 2) - at(1, -h, 2) - at(2, h, 1) + at(2, -h, 1)) / (2.0 * h);
            out[1] = (at(2, h, 0) - at(2, -h, 0) - at(0, h, 2) + at(0, -h, 2)) / (2.0 * h);
            out[2] = (at(0, h, 1) - at(0, -h, 1) - at(1, h, 0) + at(1, -h, 0)) / (2.0 * h);
            return out;
        };
        auto curlG = [&](const std::array<double, 3>& p) {
            std::array<std::array<Cplx, 3>, 3> out;
            for (int col = 0; col < 3; ++col) {
                auto c = curl_num(evalG, p, col);
                for (int row = 0; row < 3; ++row) out[row][col] = c[row];
            }
            return out;
        };
        const auto G = evalG(x);
        double scale = 0.0, res = 0.0;
        for (int col = 0; col < 3; ++col) {
            auto cc = curl_num(curlG, x, col);
            for (int row = 0; row < 3; ++row) {
                const Cplx r = cc[row] - k2 * G[row][col];
                res = std::max(res, std::abs(r));
                scale = std::max(scale, std::abs(k2 * G[row][col]));
            }
        }
        CHECK(res / scale < 1e-4);
    }
    CHECK_THROWS_AS((void)classical_dyadic_green(1.0, 1.0, Cplx(1.0), {0, 0, 0}, {0, 0, 0}), CoincidentPoints);
}
