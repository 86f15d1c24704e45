#include "dtn.hpp"

#include <cstring>
#include <fstream>

#include "fft.hpp"
#include "kernels/kernels.hpp"

namespace emdtn {

namespace {

Jet3 d(const Jet3& f, int axis0) { return jet_diff(f, axis0 + 1); }

Jet3 christoffel_trace(const Scenario& s, int k) {
    Jet3 t = s.gamma.G[0][k][0];
    t += s.gamma.G[1][k][1];
    t += s.gamma.G[2][k][2];
    return t;
}

// sigma (d_k + Phi^{3k} + tr Gamma_k) + d_k sigma as a full symbol table.
SymbolTable y_operand(const SymbolTable& phi, const Scenario& s, int k) {
    SymbolTable b;
    b.name = "y_operand";
    b.rows = b.cols = 1;
    b.top = 1;
    const Cplx I(0.0, 1.0);
    for (int deg = 1; deg >= phi.lowest(); --deg) {
        SymbolElement slot = phi.at(deg).extract(2, k).scaled(s.sigma);
        if (deg == 1) {
            WPoly xi;
            xi.add_term(k == 0 ? 1 : 0, k == 0 ? 0 : 1, 0, I * s.sigma);
            slot = slot + SymbolElement::scalar(s.ctx, xi, 0, 1);
        }
        if (deg == 0) {
            WPoly extra;
            extra.add_term(0, 0, 0, s.sigma * christoffel_trace(s, k) + jet_diff(s.sigma, k + 1));
            extra.drop_exact_zeros();
            slot = slot + SymbolElement::scalar(s.ctx, extra, 0, 0);
        }
        slot.canonicalize();
        b.slots.push_back(std::move(slot));
    }
    return b;
}

}  // namespace

SymbolTable assemble_L(const SymbolTable& phi, const SymbolTable& q, const Scenario& s, int lowest_degree) {
    if (phi.lowest() > lowest_degree)
        throw InsufficientDepth("assemble_L: phi too shallow (need degree " + std::to_string(lowest_degree) + ")");
    if (q.lowest() > lowest_degree - 2)
        throw InsufficientDepth("assemble_L: q too shallow (need degree " + std::to_string(lowest_degree - 2) + ")");
    const Cplx I(0.0, 1.0);
    const MetricData& m = s.metric;

    SymbolTable L;
    L.name = "L";
    L.rows = L.cols = 2;
    L.top = 1;
    for (int deg = 1; deg >= lowest_degree; --deg) L.slots.push_back(SymbolElement::make(s.ctx, 2, 2, deg, 0));

    for (int k = 0; k < 2; ++k) {
        const SymbolTable bk = y_operand(phi, s, k);
        const SymbolTable yk = sym_compose(q, bk, lowest_degree - 1, "y");
        for (int j = 0; j < 2; ++j) {
            // phi^{jk}
            for (int deg = 1; deg >= lowest_degree; --deg) L.at(deg) = L.at(deg) + phi.at(deg).extract(j, k).embed(2, 2, j, k);
            // - phi^{j3} o y_k
            const SymbolTable phij3 = phi.extract(j, 2);
            const SymbolTable comp = sym_compose(phij3, yk, lowest_degree, "phi_y");
            for (int deg = std::min(1, comp.top); deg >= lowest_degree; --deg)
                L.at(deg) = L.at(deg) + (-comp.at(deg)).embed(2, 2, j, k);
            // + sum_a g^{aj} (d_a y_k + y_k (i xi_a)) + zeroth metric term
            for (int a = 0; a < 2; ++a) {
                const Jet3& gaj = m.up[a][j];
                for (int deg = std::min(L.top, yk.top + 1); deg >= lowest_degree; --deg) {
                    if (yk.has(deg)) L.at(deg) = L.at(deg) + sym_dx(yk.at(deg), a + 1).scaled(gaj).embed(2, 2, j, k);
                    if (yk.has(deg - 1)) {
                        WPoly xi;
                        xi.add_term(a == 0 ? 1 : 0, a == 0 ? 0 : 1, 0, Jet3::constant(s.order, 1.0));
                        const SymbolElement xia = SymbolElement::scalar(s.ctx, xi, 0, 1);
                        L.at(deg) = L.at(deg) + sym_mul(yk.at(deg - 1), xia).scaled(I * gaj).embed(2, 2, j, k);
                    }
                }
                if (lowest_degree <= 0) {
                    WPoly zero_term;
                    zero_term.add_term(0, 0, 0, gaj * d(m.lo[a][k], 2));
                    zero_term.drop_exact_zeros();
                    L.at(0) = L.at(0) + SymbolElement::scalar(s.ctx, zero_term, 0, 0).embed(2, 2, j, k);
                }
            }
        }
    }
    for (auto& slot : L.slots) slot.canonicalize();
    return L;
}

DtnTables assemble_Lambda_psi(SymbolTable L, const Scenario& s) {
    const MetricData& m = s.metric;
    // mixing matrix G = [-g12, -g22; g11, g12]
    std::vector<Jet3> G = {-m.lo[0][1], -m.lo[1][1], m.lo[0][0], m.lo[0][1]};
    SymbolTable lam = sym_right_mul_op(L, G, 2, 2, L.lowest(), "Lambda");
    // prefactor 1/(i omega mu sqrt|g|)
    const Jet3 pref = (Cplx(0.0, -1.0 / s.omega)) * (s.mu_inv * m.inv_sqrt_det);
    for (auto& slot : lam.slots) {
        slot = slot.scaled(pref);
        slot.canonicalize();
    }
    SymbolTable psi = table_restrict_boundary(lam);
    psi.name = "psi";
    DtnTables out;
    out.L = std::move(L);
    out.Lambda = std::move(lam);
    out.psi = std::move(psi);
    return out;
}

SymbolTable dtn_unmix(const SymbolTable& lambda, double omega, const Jet3& mu, const Jet3& lo11, const Jet3& lo12,
                      const Jet3& lo22, int out_lowest) {
    // L = (i omega mu sqrt|g|) Lambda o G^{-1}, G^{-1} = (1/|g|) [g12, g22; -g11, -g12]
    const Jet3 det = lo11 * lo22 - lo12 * lo12;
    const Jet3 inv_det = jet_inv(det);
    std::vector<Jet3> Ginv = {lo12 * inv_det, lo22 * inv_det, -lo11 * inv_det, -lo12 * inv_det};
    SymbolTable scaled = lambda;
    const Jet3 pref = Cplx(0.0, omega) * (mu * jet_sqrt(det));
    for (auto& slot : scaled.slots) slot = slot.scaled(pref);
    SymbolTable L = sym_right_mul_op(scaled, Ginv, 2, 2, out_lowest, "L");
    for (auto& slot : L.slots) slot.canonicalize();
    return L;
}

ForwardTables forward_pipeline(const Scenario& s) {
    ForwardTables t;
    const OperatorCoefficients coeffs = assemble_b_c(s);
    t.phi = phi_recursion(coeffs, s, s.phi_lowest());
    t.q = q_recursion(t.phi, s, s.q_lowest());
    t.L = assemble_L(t.phi, t.q, s, s.l_lowest());
    DtnTables d = assemble_Lambda_psi(t.L, s);
    t.L = std::move(d.L);
    t.Lambda = std::move(d.Lambda);
    t.psi = std::move(d.psi);
    return t;
}

int grid_frequency(std::size_t i, std::size_t n) {
    return i <= n / 2 ? static_cast<int>(i) : static_cast<int>(i) - static_cast<int>(n);
}

BoundaryField apply_dtn(const SymbolTable& table, const BoundaryField& f, int depth, int jobs) {
    if (depth < 1 || table.top - depth + 1 < table.lowest())
        throw DepthUnavailable("apply_dtn: requested depth " + std::to_string(depth) + " exceeds the computed table");
    if (f.n1 == 0 || f.n2 == 0 || f.a.size() != f.n1 * f.n2 || f.b.size() != f.n1 * f.n2)
        throw Error("apply_dtn: malformed field grid");
    std::vector<Cplx> fa = f.a, fb = f.b;
    fft2(fa, f.n1, f.n2, false);
    fft2(fb, f.n1, f.n2, false);
    const int dlo = table.top - depth + 1;
    kernels::parallel_for(f.n2, jobs, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i2 = lo; i2 < hi; ++i2) {
            for (std::size_t i1 = 0; i1 < f.n1; ++i1) {
                const std::size_t idx = i2 * f.n1 + i1;
                const int k1 = grid_frequency(i1, f.n1);
                const int k2 = grid_frequency(i2, f.n2);
                if (k1 == 0 && k2 == 0) {
                    fa[idx] = Cplx(0.0);
                    fb[idx] = Cplx(0.0);
                    continue;
                }
                Cplx m00(0.0), m01(0.0), m10(0.0), m11(0.0);
                for (int dd = table.top; dd >= dlo; --dd) {
                    const auto v = sym_eval(table.at(dd), double(k1), double(k2));
                    m00 += v[0];
                    m01 += v[1];
                    m10 += v[2];
                    m11 += v[3];
                }
                const Cplx va = fa[idx], vb = fb[idx];
                fa[idx] = m00 * va + m01 * vb;
                fb[idx] = m10 * va + m11 * vb;
            }
        }
    });
    fft2(fa, f.n1, f.n2, true);
    fft2(fb, f.n1, f.n2, true);
    BoundaryField out;
    out.n1 = f.n1;
    out.n2 = f.n2;
    out.a = std::move(fa);
    out.b = std::move(fb);
    return out;
}

void save_field(const std::string& path, const BoundaryField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("save_field: cannot open " + path);
    os << "emdtn-field v1\n";
    os << "dims " << f.n1 << " " << f.n2 << "\n";
    os << "dtype complex128-le\n";
    os << "data\n";
    static_assert(sizeof(Cplx) == 16);
    os.write(reinterpret_cast<const char*>(f.a.data()), static_cast<std::streamsize>(f.a.size() * sizeof(Cplx)));
    os.write(reinterpret_cast<const char*>(f.b.data()), static_cast<std::streamsize>(f.b.size() * sizeof(Cplx)));
    if (!os) throw Error("save_field: write failed for " + path);
}

BoundaryField load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("load_field: cannot open " + path);
    std::string line;
    std::getline(is, line);
    if (line != "emdtn-field v1") throw ParseError("load_field: bad magic in " + path);
    BoundaryField f;
    std::getline(is, line);
    if (std::sscanf(line.c_str(), "dims %zu %zu", &f.n1, &f.n2) != 2) throw ParseError("load_field: bad dims line");
    std::getline(is, line);
    if (line != "dtype complex128-le") throw ParseError("load_field: unsupported dtype");
    std::getline(is, line);
    if (line != "data") throw ParseError("load_field: missing data section");
    const std::size_t n = f.n1 * f.n2;
    f.a.resize(n);
    f.b.resize(n);
    is.read(reinterpret_cast<char*>(f.a.data()), static_cast<std::streamsize>(n * sizeof(Cplx)));
    is.read(reinterpret_cast<char*>(f.b.data()), static_cast<std::streamsize>(n * sizeof(Cplx)));
    if (!is) throw ParseError("load_field: truncated data in " + path);
    return f;
}

}  // namespace emdtn
