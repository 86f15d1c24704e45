#include <doctest.h>

#include <cmath>
#include <random>

#include "scenario.hpp"
#include "symalg.hpp"
#include "test_util.hpp"

using namespace emdtn;
using testutil::random_jet;

namespace {

Ctx flat_ctx(int order) { return make_flat_scenario(order).ctx; }

Ctx random_ctx(std::mt19937_64& rng, int order) {
    auto q = std::make_shared<QContext>();
    q->order = order;
    q->up11 = random_jet(rng, order, false, Cplx(1.0));
    q->up12 = random_jet(rng, order, false, Cplx(0.0));
    q->up22 = random_jet(rng, order, false, Cplx(1.0));
    q->up11_inv = jet_inv(q->up11);
    return q;
}

// random scalar element: (jet * xi1^a xi2^b w^e) / Q^k, homogeneous
SymbolElement random_element(std::mt19937_64& rng, const Ctx& ctx, int nterms, int qpow) {
    WPoly p;
    bool have_degree = false;
    int degree = 0;
    for (int t = 0; t < nterms; ++t) {
        const int e = int(rng() % 2);
        int d1 = int(rng() % 3);
        int d2;
        if (!have_degree) {
            d2 = int(rng() % 3);
            degree = d1 + d2 + e - 2 * qpow;
            have_degree = true;
        } else {
            d2 = degree + 2 * qpow - e - d1;
            if (d2 < 0) {
                d1 += d2;
                d2 = 0;
                if (d1 < 0) continue;
            }
        }
        p.add_term(d1, d2, e, random_jet(rng, ctx->order));
    }
    return SymbolElement::scalar(ctx, p, qpow, degree);
}

}  // namespace

TEST_CASE("defining relation and simple products") {
    const Ctx ctx = flat_ctx(4);
    const SymbolElement w = SymbolElement::weight(ctx);
    const SymbolElement ww = sym_mul(w, w);
    CHECK(ww.degree() == 2);
    // flat Q = xi1^2 + xi2^2
    CHECK(std::abs(sym_eval(ww, 3.0, 4.0)[0] - Cplx(25.0)) < 1e-12);
    for (const auto& [k, v] : ww.entry(0, 0).terms()) {
        CHECK(k.e == 0);  // w^2 rewritten
        (void)v;
    }

    // (xi1/w)(xi2/w) = xi1 xi2 / Q
    WPoly p1, p2;
    p1.add_term(1, 0, 1, Jet3::constant(4, 1.0));  // xi1 w / Q = xi1 / w
    p2.add_term(0, 1, 1, Jet3::constant(4, 1.0));
    const SymbolElement a = SymbolElement::scalar(ctx, p1, 1, 0);
    const SymbolElement b = SymbolElement::scalar(ctx, p2, 1, 0);
    const SymbolElement ab = sym_mul(a, b);
    CHECK(ab.degree() == 0);
    CHECK(std::abs(sym_eval(ab, 1.0, 1.0)[0] - Cplx(0.5)) < 1e-14);
    CHECK(ab.q_power() == 1);  // xi1 xi2 / Q after cancelling one Q
}

TEST_CASE("sym_eval spot values") {
    const Ctx ctx = flat_ctx(4);
    const SymbolElement w = SymbolElement::weight(ctx);
    CHECK(std::abs(sym_eval(w, 3.0, 4.0)[0] - Cplx(5.0)) < 1e-14);
    CHECK_THROWS_AS((void)sym_eval(w, 0.0, 0.0), ZeroCovector);
}

TEST_CASE("product matches pointwise evaluation on random elements") {
    std::mt19937_64 rng(53);
    const Ctx ctx = random_ctx(rng, 4);
    for (int rep = 0; rep < 8; ++rep) {
        const SymbolElement a = random_element(rng, ctx, 3, int(rng() % 2));
        const SymbolElement b = random_element(rng, ctx, 3, int(rng() % 2));
        const SymbolElement ab = sym_mul(a, b);
        for (int s = 0; s < 20; ++s) {
            const double x1 = testutil::uniform_pm(rng, 2.0);
            const double x2 = testutil::uniform_pm(rng, 2.0);
            if (x1 * x1 + x2 * x2 < 0.1) continue;
            const Cplx va = sym_eval(a, x1, x2)[0];
            const Cplx vb = sym_eval(b, x1, x2)[0];
            const Cplx vab = sym_eval(ab, x1, x2)[0];
            const double scale = std::max(1e-12, std::abs(va * vb));
            CHECK(std::abs(vab - va * vb) / scale < 1e-11);
        }
    }
}

TEST_CASE("xi-derivative: closed forms and finite differences") {
    const Ctx ctx = flat_ctx(4);
    const SymbolElement w = SymbolElement::weight(ctx);
    // flat: d w / d xi1 = xi1 / w
    const SymbolElement dw = sym_dxi(w, 1);
    CHECK(dw.degree() == 0);
    CHECK(std::abs(sym_eval(dw, 3.0, 4.0)[0] - Cplx(0.6)) < 1e-13);

    WPoly p;
    p.add_term(1, 1, 0, Jet3::constant(4, 1.0));
    const SymbolElement xy = SymbolElement::scalar(ctx, p, 0, 2);
    const SymbolElement dxy = sym_dxi(xy, 2);
    CHECK(std::abs(sym_eval(dxy, 3.0, 4.0)[0] - Cplx(3.0)) < 1e-13);

    std::mt19937_64 rng(59);
    const Ctx rctx = random_ctx(rng, 4);
    for (int rep = 0; rep < 5; ++rep) {
        const SymbolElement a = random_element(rng, rctx, 3, 1);
        for (int m = 1; m <= 2; ++m) {
            const SymbolElement da = sym_dxi(a, m);
            const double x1 = 1.0 + testutil::uniform_pm(rng, 0.5);
            const double x2 = 0.7 + testutil::uniform_pm(rng, 0.5);
            const double h = 1e-5;
            const Cplx fp = sym_eval(a, x1 + (m == 1 ? h : 0.0), x2 + (m == 2 ? h : 0.0))[0];
            const Cplx fm = sym_eval(a, x1 - (m == 1 ? h : 0.0), x2 - (m == 2 ? h : 0.0))[0];
            const Cplx fd = (fp - fm) / (2.0 * h);
            const Cplx sym = sym_eval(da, x1, x2)[0];
            CHECK(std::abs(fd - sym) / std::max(1.0, std::abs(sym)) < 1e-6);
        }
    }
}

TEST_CASE("x-derivative: chain rule through w and finite differences") {
    // g^{11} = 1 + x3, flat otherwise: d3 w = xi1^2 / (2w)
    auto q = std::make_shared<QContext>();
    q->order = 4;
    q->up11 = Jet3::constant(4, 1.0);
    q->up11.set(0, 0, 1, 1.0);
    q->up12 = Jet3::constant(4, 0.0);
    q->up22 = Jet3::constant(4, 1.0);
    q->up11_inv = jet_inv(q->up11);
    Ctx ctx = q;
    const SymbolElement w = SymbolElement::weight(ctx);
    const SymbolElement d3w = sym_dx(w, 3);
    // at xi = (1, 1), x = 0: xi1^2/(2w) = 1/(2 sqrt 2)
    CHECK(std::abs(sym_eval(d3w, 1.0, 1.0)[0] - Cplx(0.5 / std::sqrt(2.0))) < 1e-13);
    // constant-coefficient element has zero tangential x-derivative
    const SymbolElement dx1 = sym_dx(SymbolElement::xi(ctx, 1), 1);
    CHECK(dx1.max_abs() == 0.0);

    // finite differences in x against jet evaluation
    std::mt19937_64 rng(61);
    const Ctx rctx = random_ctx(rng, 4);
    for (int rep = 0; rep < 4; ++rep) {
        const SymbolElement a = random_element(rng, rctx, 3, 1);
        for (int l = 1; l <= 3; ++l) {
            const SymbolElement da = sym_dx(a, l);
            const Jet3 aj = sym_eval_jet(a, 1.0, 0.7)[0];
            const Jet3 daj = sym_eval_jet(da, 1.0, 0.7)[0];
            const double h = 1e-5;
            std::array<double, 3> xp{0, 0, 0}, xm{0, 0, 0};
            xp[l - 1] = h;
            xm[l - 1] = -h;
            const Cplx fd = (aj.eval(xp[0], xp[1], xp[2]) - aj.eval(xm[0], xm[1], xm[2])) / (2.0 * h);
            const Cplx sym = daj.value();
            CHECK(std::abs(fd - sym) / std::max(1.0, std::abs(sym)) < 1e-6);
        }
    }
}

TEST_CASE("homogeneity under xi scaling") {
    std::mt19937_64 rng(67);
    const Ctx ctx = random_ctx(rng, 4);
    for (int rep = 0; rep < 6; ++rep) {
        const SymbolElement a = random_element(rng, ctx, 4, int(rng() % 3));
        const double x1 = 1.1, x2 = -0.6, t = 1.7;
        const Cplx v1 = sym_eval(a, t * x1, t * x2)[0];
        const Cplx v2 = std::pow(t, a.degree()) * sym_eval(a, x1, x2)[0];
        CHECK(std::abs(v1 - v2) / std::max(1e-12, std::abs(v2)) < 1e-10);
    }
}

TEST_CASE("derivatives commute and satisfy Leibniz") {
    std::mt19937_64 rng(71);
    const Ctx ctx = random_ctx(rng, 5);
    const SymbolElement a = random_element(rng, ctx, 3, 1);
    const SymbolElement b = random_element(rng, ctx, 3, 0);
    auto close = [](const SymbolElement& u, const SymbolElement& v) {
        const SymbolElement d = u - v;
        return d.max_abs() < 1e-10 * std::max(1.0, std::max(u.max_abs(), v.max_abs()));
    };
    CHECK(close(sym_dxi(sym_dxi(a, 1), 2), sym_dxi(sym_dxi(a, 2), 1)));
    CHECK(close(sym_dx(sym_dx(a, 1), 3), sym_dx(sym_dx(a, 3), 1)));
    CHECK(close(sym_dxi(sym_dx(a, 2), 1), sym_dx(sym_dxi(a, 1), 2)));
    CHECK(close(sym_dxi(sym_mul(a, b), 1), sym_mul(sym_dxi(a, 1), b) + sym_mul(a, sym_dxi(b, 1))));
    CHECK(close(sym_dx(sym_mul(a, b), 2), sym_mul(sym_dx(a, 2), b) + sym_mul(a, sym_dx(b, 2))));
}

TEST_CASE("canonicalization is idempotent and preserves values") {
    std::mt19937_64 rng(73);
    const Ctx ctx = random_ctx(rng, 4);
    const SymbolElement a = random_element(rng, ctx, 3, 0);
    // a * Q / Q should cancel back to qpow 0
    SymbolElement aq = SymbolElement::make(ctx, 1, 1, a.degree(), 1);
    aq.entry(0, 0) = wpoly_mul_q(ctx, a.entry(0, 0));
    aq.canonicalize();
    CHECK(aq.q_power() == 0);
    const SymbolElement d = aq - a;
    CHECK(d.max_abs() < 1e-10 * std::max(1.0, a.max_abs()));
    SymbolElement again = aq;
    again.canonicalize();
    CHECK((again - aq).max_abs() == 0.0);
}

TEST_CASE("scenario mismatch is rejected") {
    std::mt19937_64 rng(79);
    const Ctx c1 = flat_ctx(4);
    const Ctx c2 = random_ctx(rng, 4);
    CHECK_THROWS_AS((void)sym_mul(SymbolElement::weight(c1), SymbolElement::weight(c2)), ScenarioMismatch);
}
