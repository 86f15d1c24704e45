#include "factor.hpp"

#include <cmath>

#include "errors.hpp"

namespace emdtn {

namespace {

Cplx minus_i_pow(int t) {
    switch (t & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, -1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, 1.0};
    }
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Jet3 d(const Jet3& f, int axis0) { return jet_diff(f, axis0 + 1); }

// sum_l Gamma^l_{kl}, equal to d_k sqrt|g| / sqrt|g| in normal coordinates.
Jet3 christoffel_trace(const Scenario& s, int k) {
    Jet3 t = s.gamma.G[0][k][0];
    t += s.gamma.G[1][k][1];
    t += s.gamma.G[2][k][2];
    return t;
}

WPoly xi_linear(const Jet3& coeff_xi1, const Jet3& coeff_xi2) {
    WPoly p;
    p.add_term(1, 0, 0, coeff_xi1);
    p.add_term(0, 1, 0, coeff_xi2);
    p.drop_exact_zeros();
    return p;
}

}  // namespace

OperatorCoefficients assemble_b_c(const Scenario& s) {
    const Ctx& ctx = s.ctx;
    const int n = s.order;
    const Cplx I(0.0, 1.0);
    const MetricData& m = s.metric;

    Jet3 dmu[3], dsig_over_sig[3];
    for (int l = 0; l < 3; ++l) {
        dmu[l] = d(s.mu, l);
        dsig_over_sig[l] = s.sigma_inv * d(s.sigma, l);
    }
    const Jet3 inv_det = jet_inv(m.det2);
    const Jet3 mu_inv_det = s.mu_inv * inv_det;

    // half_tr3 = (1/2) sum g^{ab} d3 g_{ab} = sum_gamma Gamma^gamma_{3 gamma}
    Jet3 half_tr3(n - 1);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) half_tr3 += m.up[a][b] * d(m.lo[a][b], 2);
    half_tr3 *= Cplx(0.5);

    // ---- b0 ----
    SymbolElement b0 = SymbolElement::make(ctx, 3, 3, 0, 0);
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            Jet3 v = Cplx(2.0) * s.gamma.G[j][k][2];
            if (j == k) v += half_tr3;
            if (j == 2) v += dsig_over_sig[k];
            if (j == 0 && k == 0) v -= s.mu_inv * dmu[2];
            if (j == 1 && k == 1) v -= s.mu_inv * dmu[2];
            if (j == 2 && k < 2) v += s.mu_inv * dmu[k];
            WPoly p;
            p.add_term(0, 0, 0, v);
            p.drop_exact_zeros();
            b0.entry(j, k) = std::move(p);
        }
    }

    // ---- c2 = -Q I3 ----
    SymbolElement c2 = SymbolElement::make(ctx, 3, 3, 2, 0);
    for (int j = 0; j < 3; ++j) {
        WPoly p;
        p.add_term(2, 0, 0, -ctx->up11);
        p.add_term(1, 1, 0, Cplx(-2.0) * ctx->up12);
        p.add_term(0, 2, 0, -ctx->up22);
        p.drop_exact_zeros();
        c2.entry(j, j) = std::move(p);
    }

    // ---- c1 ----
    SymbolElement c1 = SymbolElement::make(ctx, 3, 3, 1, 0);
    Jet3 scalar_xi[2];  // coefficient of xi_beta in the I3 part
    for (int b = 0; b < 2; ++b) {
        Jet3 v(n - 1);
        for (int a = 0; a < 2; ++a) v += m.up[a][b] * christoffel_trace(s, a) + d(m.up[a][b], a);
        scalar_xi[b] = v;
    }
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            Jet3 cx1(n - 1), cx2(n - 1);
            if (j == k) {
                cx1 += scalar_xi[0];
                cx2 += scalar_xi[1];
            }
            for (int a = 0; a < 2; ++a) {
                cx1 += Cplx(2.0) * (m.up[a][0] * s.gamma.G[j][k][a]);
                cx2 += Cplx(2.0) * (m.up[a][1] * s.gamma.G[j][k][a]);
            }
            if (j < 2) {
                cx1 += m.up[j][0] * dsig_over_sig[k];
                cx2 += m.up[j][1] * dsig_over_sig[k];
            }
            // mu block, tangential part of (grad log mu) x curl
            if (j == 0 && k == 0) {
                cx1 += mu_inv_det * dmu[1] * m.lo[0][1];
                cx2 -= mu_inv_det * dmu[1] * m.lo[0][0];
            } else if (j == 0 && k == 1) {
                cx1 += mu_inv_det * dmu[1] * m.lo[1][1];
                cx2 -= mu_inv_det * dmu[1] * m.lo[0][1];
            } else if (j == 0 && k == 2) {
                cx1 += mu_inv_det * dmu[2] * m.lo[1][1];
                cx2 -= mu_inv_det * dmu[2] * m.lo[0][1];
            } else if (j == 1 && k == 0) {
                cx1 -= mu_inv_det * dmu[0] * m.lo[0][1];
                cx2 += mu_inv_det * dmu[0] * m.lo[0][0];
            } else if (j == 1 && k == 1) {
                cx1 -= mu_inv_det * dmu[0] * m.lo[1][1];
                cx2 += mu_inv_det * dmu[0] * m.lo[0][1];
            } else if (j == 1 && k == 2) {
                cx1 -= mu_inv_det * dmu[2] * m.lo[0][1];
                cx2 += mu_inv_det * dmu[2] * m.lo[0][0];
            } else if (j == 2 && k == 2) {
                cx1 += mu_inv_det * (m.lo[0][1] * dmu[1] - m.lo[1][1] * dmu[0]);
                cx2 += mu_inv_det * (m.lo[0][1] * dmu[0] - m.lo[0][0] * dmu[1]);
            }
            c1.entry(j, k) = xi_linear(I * cx1, I * cx2);
        }
    }

    // ---- c0 ----
    const Jet3 w2ms = Cplx(s.omega * s.omega) * (s.mu * s.sigma);
    SymbolElement c0 = SymbolElement::make(ctx, 3, 3, 0, 0);
    // mu zeroth-order block: (1/(mu |g|)) P dG
    Jet3 P[3][3], dG[3][3];
    P[0][0] = -m.lo[0][1] * dmu[2];
    P[0][1] = -m.lo[1][1] * dmu[2];
    P[0][2] = dmu[1];
    P[1][0] = m.lo[0][0] * dmu[2];
    P[1][1] = m.lo[0][1] * dmu[2];
    P[1][2] = -dmu[0];
    P[2][0] = m.lo[0][1] * dmu[0] - m.lo[0][0] * dmu[1];
    P[2][1] = m.lo[1][1] * dmu[0] - m.lo[0][1] * dmu[1];
    P[2][2] = Jet3::constant(n - 1, 0.0);
    dG[0][0] = -d(m.lo[0][1], 2);
    dG[0][1] = -d(m.lo[1][1], 2);
    dG[1][0] = d(m.lo[0][0], 2);
    dG[1][1] = d(m.lo[0][1], 2);
    dG[2][0] = d(m.lo[0][1], 0) - d(m.lo[0][0], 1);
    dG[2][1] = d(m.lo[1][1], 0) - d(m.lo[0][1], 1);
    dG[0][2] = dG[1][2] = dG[2][2] = Jet3::constant(n - 1, 0.0);
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            Jet3 v = connection_block(m, s.gamma, j, k) - s.curv.mixed[j][k];
            if (j == k) v += w2ms;
            // sigma Hessian block
            const Jet3 h = dsig_over_sig[k];
            if (j < 2) {
                for (int b = 0; b < 2; ++b) v += m.up[j][b] * d(h, b);
            } else {
                v += d(h, 2);
            }
            // mu block
            Jet3 mu_part(n - 2);
            for (int t = 0; t < 3; ++t) mu_part += P[j][t] * dG[t][k];
            v += mu_inv_det * mu_part;
            WPoly p;
            p.add_term(0, 0, 0, v);
            p.drop_exact_zeros();
            c0.entry(j, k) = std::move(p);
        }
    }

    return OperatorCoefficients{std::move(b0), std::move(c2), std::move(c1), std::move(c0)};
}

VectorFieldJet apply_factored_operator(const OperatorCoefficients& coeffs, const Scenario& s, const VectorFieldJet& e) {
    (void)s;
    const Cplx mI(0.0, -1.0);
    VectorFieldJet out;
    for (int j = 0; j < 3; ++j) {
        Jet3 acc = d(d(e.X[j], 2), 2);  // d33
        for (int k = 0; k < 3; ++k) {
            // B d3
            for (const auto& [key, v] : coeffs.b0.entry(j, k).terms()) {
                (void)key;
                acc += v * d(e.X[k], 2);
            }
            // C: the symbol of d_a is i xi_a, so the monomial xi_a acts as
            // -i d_a.
            auto apply_poly = [&](const SymbolElement& c) {
                for (const auto& [key, v] : c.entry(j, k).terms()) {
                    Jet3 t = e.X[k];
                    for (int i = 0; i < key.d1; ++i) t = mI * d(t, 0);
                    for (int i = 0; i < key.d2; ++i) t = mI * d(t, 1);
                    acc += v * t;
                }
            };
            apply_poly(coeffs.c2);
            apply_poly(coeffs.c1);
            apply_poly(coeffs.c0);
        }
        out.X[j] = acc;
    }
    return out;
}

SymbolElement compose_slot(const SymbolTable& a, const SymbolTable& b, int degree) {
    const Ctx& ctx = a.slots.front().ctx();
    SymbolElement acc = SymbolElement::make(ctx, a.rows, b.cols, degree, 0);
    for (int i = a.lowest(); i <= a.top; ++i) {
        if (a.at(i).is_zero()) continue;
        for (int j = b.lowest(); j <= b.top; ++j) {
            const int t = i + j - degree;
            if (t < 0) continue;
            if (b.at(j).is_zero()) continue;
            for (int t1 = 0; t1 <= t; ++t1) {
                const int t2 = t - t1;
                SymbolElement ai = a.at(i);
                for (int u = 0; u < t1; ++u) ai = sym_dxi(ai, 1);
                for (int u = 0; u < t2; ++u) ai = sym_dxi(ai, 2);
                if (ai.is_zero()) continue;
                SymbolElement bj = b.at(j);
                for (int u = 0; u < t1; ++u) bj = sym_dx(bj, 1);
                for (int u = 0; u < t2; ++u) bj = sym_dx(bj, 2);
                if (bj.is_zero()) continue;
                acc = acc + sym_mul(ai, bj).scaled(minus_i_pow(t) / Cplx(factorial(t1) * factorial(t2)));
            }
        }
    }
    acc.canonicalize();
    return acc;
}

namespace {

// Equation slot d of (phi o phi) - b0 phi - d3 phi + c with whatever phi
// slots are present.
SymbolElement equation_slot(const OperatorCoefficients& coeffs, const SymbolTable& phi, int dslot) {
    const Ctx& ctx = phi.slots.front().ctx();
    SymbolElement acc = compose_slot(phi, phi, dslot);
    if (phi.has(dslot)) {
        acc = acc - sym_mul(coeffs.b0, phi.at(dslot));
        acc = acc - sym_dx(phi.at(dslot), 3);
    }
    if (dslot == 2) acc = acc + coeffs.c2;
    if (dslot == 1) acc = acc + coeffs.c1;
    if (dslot == 0) acc = acc + coeffs.c0;
    (void)ctx;
    return acc;
}

}  // namespace

SymbolTable phi_recursion(const OperatorCoefficients& coeffs, const Scenario& s, int lowest_degree) {
    if (lowest_degree > 1) throw InsufficientDepth("phi_recursion: lowest degree must be <= 1");
    if (1 - lowest_degree > s.order)
        throw JetOrderExhausted("phi recursion at degree " + std::to_string(lowest_degree) + " needs jet order >= " +
                                std::to_string(1 - lowest_degree) + "; scenario has N = " + std::to_string(s.order));
    SymbolTable phi;
    phi.name = "phi";
    phi.rows = phi.cols = 3;
    phi.top = 1;
    // phi_1 = w I3 (positive root; nu is outward)
    SymbolElement phi1 = SymbolElement::make(s.ctx, 3, 3, 1, 0);
    for (int j = 0; j < 3; ++j) {
        WPoly w;
        w.add_term(0, 0, 1, Jet3::constant(s.order, 1.0));
        phi1.entry(j, j) = std::move(w);
    }
    phi.slots.push_back(std::move(phi1));

    // 1/(2w) = w / (2 Q)
    WPoly half_w;
    half_w.add_term(0, 0, 1, Jet3::constant(s.order, 0.5));
    const SymbolElement half_w_inv = SymbolElement::scalar(s.ctx, half_w, 1, -1);

    for (int target = 0; target >= lowest_degree; --target) {
        const SymbolElement rest = equation_slot(coeffs, phi, target + 1);
        SymbolElement next = sym_mul(half_w_inv, rest).scaled(Cplx(-1.0));
        next.canonicalize();
        phi.slots.push_back(std::move(next));
    }
    return phi;
}

std::map<int, double> factorization_residual(const OperatorCoefficients& coeffs, const SymbolTable& phi) {
    std::map<int, double> out;
    for (int dslot = 2; dslot >= phi.lowest(); --dslot) out[dslot] = equation_slot(coeffs, phi, dslot).max_abs();
    return out;
}

SymbolTable q_operand(const SymbolTable& phi, const Scenario& s) {
    SymbolTable a;
    a.name = "q_operand";
    a.rows = a.cols = 1;
    a.top = 1;
    const Jet3 half_tr3 = christoffel_trace(s, 2);
    for (int deg = 1; deg >= phi.lowest(); --deg) {
        SymbolElement slot = phi.at(deg).extract(2, 2).scaled(s.sigma);
        if (deg == 0) {
            WPoly extra;
            extra.add_term(0, 0, 0, s.sigma * half_tr3 + jet_diff(s.sigma, 3));
            extra.drop_exact_zeros();
            slot = slot + SymbolElement::scalar(s.ctx, extra, 0, 0);
        }
        slot.canonicalize();
        a.slots.push_back(std::move(slot));
    }
    return a;
}

SymbolTable q_recursion(const SymbolTable& phi, const Scenario& s, int lowest_degree) {
    if (lowest_degree > -1) throw InsufficientDepth("q_recursion: lowest degree must be <= -1");
    if (phi.lowest() > lowest_degree + 2)
        throw InsufficientDepth("q_recursion: phi must be computed to degree " + std::to_string(lowest_degree + 2));
    const SymbolTable a = q_operand(phi, s);

    SymbolTable q;
    q.name = "q";
    q.rows = q.cols = 1;
    q.top = -1;
    // q_{-1} = 1/(sigma w) = sigma^{-1} w / Q
    WPoly p;
    p.add_term(0, 0, 1, s.sigma_inv);
    const SymbolElement inv_sw = SymbolElement::scalar(s.ctx, p, 1, -1);
    q.slots.push_back(inv_sw);

    for (int target = -2; target >= lowest_degree; --target) {
        const SymbolElement rest = compose_slot(q, a, target + 1);
        SymbolElement next = sym_mul(rest, inv_sw).scaled(Cplx(-1.0));
        next.canonicalize();
        q.slots.push_back(std::move(next));
    }
    return q;
}

std::map<int, double> q_composition_residual(const SymbolTable& phi, const SymbolTable& q, const Scenario& s) {
    const SymbolTable a = q_operand(phi, s);
    std::map<int, double> out;
    for (int dslot = 0; dslot >= q.lowest(); --dslot) {
        SymbolElement r = compose_slot(q, a, dslot);
        if (dslot == 0) {
            WPoly one;
            one.add_term(0, 0, 0, Jet3::constant(s.order, 1.0));
            r = r - SymbolElement::scalar(s.ctx, one, 0, 0);
        }
        out[dslot] = r.max_abs();
    }
    return out;
}

}  // namespace emdtn
