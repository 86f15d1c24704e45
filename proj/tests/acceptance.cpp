// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fails. Runs the whole pipeline at desk scale; the tolerances are pinned
// in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <vector>

#include "commands.hpp"
#include "files.hpp"
#include "recon.hpp"

using namespace emdtn;

namespace {

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(const char* id, bool ok, const std::string& detail, double seconds) {
    std::printf("[%s] %-4s %s (t=%.1fs)\n", ok ? "ok" : "FAIL", id, detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double field_max(const VectorFieldJet& x) {
    double m = 0.0;
    for (const auto& c : x.X) m = std::max(m, c.max_abs());
    return m;
}

Jet3 seeded_jet(std::mt19937_64& rng, int order) {
    Jet3 j(order);
    for (int k3 = 0; k3 <= order; ++k3)
        for (int k2 = 0; k2 + k3 <= order; ++k2)
            for (int k1 = 0; k1 + k2 + k3 <= order; ++k1) {
                const int total = k1 + k2 + k3;
                double fact = 1.0;
                for (int i = 2; i <= total + 1; ++i) fact *= i;
                j.set(k1, k2, k3,
                      Cplx((double(rng() >> 11) * 0x1.0p-53 - 0.5) / fact,
                           (double(rng() >> 11) * 0x1.0p-53 - 0.5) / fact));
            }
    return j;
}

double rel(Cplx got, Cplx want) { return std::abs(got - want) / std::max(0.05, std::abs(want)); }

// ---------------------------------------------------------------- C1
void criterion1() {
    Timer t;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const Scenario s = make_random_scenario(seed, 4, 2);
        std::mt19937_64 rng(seed * 31 + 7);
        VectorFieldJet x;
        for (int j = 0; j < 3; ++j) x.X[j] = seeded_jet(rng, 4);
        const Jet3 f = seeded_jet(rng, 4);
        worst = std::max(worst, field_max(curl_curl_identity_residual(s.metric, s.gamma, s.curv, x)));
        worst = std::max(worst, divergence(s.metric, curl(s.metric, x)).max_abs());
        worst = std::max(worst, field_max(curl(s.metric, grad(s.metric, f))));
        for (int k = 0; k < 3; ++k) {
            Jet3 lhs = s.metric.inv_sqrt_det * jet_diff(s.metric.sqrt_det, k + 1);
            Jet3 rhs = s.gamma.G[0][k][0] + s.gamma.G[1][k][1] + s.gamma.G[2][k][2];
            worst = std::max(worst, max_abs_diff(lhs, rhs));
        }
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    for (int m = 0; m < 3; ++m) {
                        Jet3 b = s.curv.riem[j][k][l][m] + s.curv.riem[j][l][m][k] + s.curv.riem[j][m][k][l];
                        worst = std::max(worst, b.max_abs());
                    }
    }
    const double sec = t.seconds();
    report("C1", worst < 1e-9 && sec < 10.0,
           "geometry identity suite, 100 scenarios at N=4: max residual " + fmt(worst), sec);
}

// ------------------------------------------------------------- C2, C3, C4
void criteria234() {
    Timer t;
    double worst_fact = 0.0, worst_q = 0.0, worst_psi = 0.0;
    bool slot2_exact = true;
    std::vector<Scenario> scenarios;
    for (std::uint64_t seed = 200; seed < 225; ++seed) scenarios.push_back(make_random_scenario(seed, 5, 4));
    double sec2 = 0.0;
    {
        Timer t2;
        for (const Scenario& s : scenarios) {
            const OperatorCoefficients co = assemble_b_c(s);
            const SymbolTable phi = phi_recursion(co, s, -3);
            const auto res = factorization_residual(co, phi);
            if (res.at(2) != 0.0) slot2_exact = false;
            for (int d = 1; d >= -2; --d) worst_fact = std::max(worst_fact, res.at(d));
        }
        sec2 = t2.seconds();
        report("C2", worst_fact < 1e-9 && slot2_exact && sec2 < 60.0,
               "factorization identity, 25 scenarios through phi_-3: max graded residual " + fmt(worst_fact) +
                   (slot2_exact ? ", degree-2 slot exactly zero" : ", degree-2 slot NOT exact"),
               sec2);
    }
    {
        Timer t3;
        for (const Scenario& s : scenarios) {
            const OperatorCoefficients co = assemble_b_c(s);
            const SymbolTable phi = phi_recursion(co, s, -3);
            const SymbolTable q = q_recursion(phi, s, -4);
            const auto res = q_composition_residual(phi, q, s);
            for (int d = 0; d >= -3; --d) worst_q = std::max(worst_q, res.at(d));
        }
        report("C3", worst_q < 1e-9, "Q-composition identity through q_-4: max graded residual " + fmt(worst_q),
               t3.seconds());
    }
    {
        Timer t4;
        for (const Scenario& s : scenarios) {
            const ForwardTables ft = forward_pipeline(s);
            const SymbolElement got = ft.psi.at(1).extract(0, 0);
            const Jet3 pref = (Cplx(0.0, 1.0 / s.omega) * (s.mu_inv * s.metric.inv_sqrt_det)).restrict_boundary();
            WPoly p;
            p.add_term(1, 1, 1, pref);
            const SymbolElement want = SymbolElement::scalar(got.ctx(), p, 1, 1);
            worst_psi = std::max(worst_psi, (got - want).max_abs());
        }
        // flat spot value psi_1^{11}(1,1) = i/sqrt(2)
        const Scenario flat = make_flat_scenario(5, 2);
        const ForwardTables ft = forward_pipeline(flat);
        const Cplx spot = sym_eval(ft.psi.at(1), 1.0, 1.0)[0];
        const double spot_err = std::abs(spot - Cplx(0.0, 1.0 / std::sqrt(2.0)));
        report("C4", worst_psi < 1e-11 && spot_err < 1e-14,
               "principal symbol closed form: max coefficient diff " + fmt(worst_psi) + ", flat spot err " +
                   fmt(spot_err),
               t4.seconds());
    }
    (void)t;
}

// ---------------------------------------------------------------- C5
void criterion5() {
    Timer t;
    bool ok = true;
    const std::array<Cplx, 3> g{1.0, 0.0, 1.0};
    {
        const auto u = invert_trace_form({-15.0, 0.0, -15.0}, g, g, 1);
        ok = ok && std::abs(u[0] - Cplx(1.0)) == 0.0 && std::abs(u[2] - Cplx(1.0)) == 0.0 && std::abs(u[1]) == 0.0;
    }
    {
        const auto u = invert_trace_form({8.0, 0.0, 1.0}, g, g, 2);
        ok = ok && std::abs(u[0] - Cplx(1.0)) == 0.0 && std::abs(u[1]) == 0.0 && std::abs(u[2]) == 0.0;
    }
    // forward arithmetic of the order-1 display: h^{ab} = diag(1,1) gives
    // k = 7 diag(1,1) - 11*2*diag(1,1) = diag(-15,-15), h = -(1/15)(-30) = 2
    {
        const Cplx k11 = 7.0 * 1.0 - 11.0 * 2.0, k22 = k11;
        ok = ok && k11 == Cplx(-15.0) && k22 == Cplx(-15.0);
    }
    report("C5", ok, "trace-inversion constants (7, -11, -1/15) and (7, +1, 1/9) with both hand examples", t.seconds());
}

// ------------------------------------------------------------- C6, C7
void criteria67() {
    ReconOptions ropts;
    ropts.jobs = 2;
    ropts.max_order = 3;
    struct Case {
        Scenario truth;
        SymbolTable psi;
        bool constant = false;
    };
    std::vector<Case> cases;
    Timer tforward;
    for (std::uint64_t seed = 900; seed < 910; ++seed) {
        Case c;
        c.truth = make_random_scenario(seed, 6, 5);  // symbols through degree -3
        cases.push_back(std::move(c));
    }
    for (int k = 0; k < 2; ++k) {  // two constant-coefficient scenarios
        Case c;
        c.truth = make_flat_scenario(6, 5);
        c.truth.g.g11 = Jet3::constant(6, k == 0 ? 2.0 : 1.3);
        c.truth.g.g12 = Jet3::constant(6, 0.2);
        c.truth.g.g22 = Jet3::constant(6, 1.0);
        c.truth.mu = Jet3::constant(6, 1.0 + 0.2 * k);
        c.truth.sigma = Jet3::constant(6, Cplx(1.1, 0.3));
        c.truth.build();
        c.constant = true;
        cases.push_back(std::move(c));
    }
    for (auto& c : cases) c.psi = forward_pipeline(c.truth).psi;
    const double forward_sec = tforward.seconds();

    {
        Timer t6;
        double worst_rand = 0.0, worst_const = 0.0;
        bool ok = true;
        for (const auto& c : cases) {
            const ReconstructionState st = reconstruct_metric(c.psi, c.truth.omega, c.truth.mu, c.truth.sigma, ropts);
            ok = ok && st.orders_done >= 3;
            double w = 0.0;
            for (int m = 0; m <= 3; ++m) {
                w = std::max(w, rel(st.up11.at(0, 0, m), c.truth.metric.up[0][0].at(0, 0, m)));
                w = std::max(w, rel(st.up12.at(0, 0, m), c.truth.metric.up[0][1].at(0, 0, m)));
                w = std::max(w, rel(st.up22.at(0, 0, m), c.truth.metric.up[1][1].at(0, 0, m)));
            }
            (c.constant ? worst_const : worst_rand) = std::max(c.constant ? worst_const : worst_rand, w);
        }
        const double sec = t6.seconds() + forward_sec;
        ok = ok && worst_rand < 1e-7 && worst_const < 1e-10 && sec < 300.0;
        report("C6", ok,
               "metric round-trip, 10 scenarios N=6 through degree -3: max rel err " + fmt(worst_rand) +
                   " (constant scenarios " + fmt(worst_const) + ")",
               sec);
    }
    {
        Timer t7;
        double worst = 0.0;
        bool ok = true;
        for (const auto& c : cases) {
            if (c.constant) continue;  // sigma(0) and orders >= 2 are degenerate at tangentially
                                       // constant scenarios up to this depth (see the recon log)
            const ReconstructionState st = reconstruct_parameters(c.psi, c.truth.omega, c.truth.g.g11, c.truth.g.g12,
                                                                  c.truth.g.g22, ropts);
            ok = ok && st.orders_done >= 3 && st.sigma0_known;
            // the B-avoidance sampler must have found a usable covector;
            // check the margin it reports through the state's design choice
            const Jet3 sig = st.sigma();
            for (int m = 0; m <= 3; ++m) {
                worst = std::max(worst, rel(st.mu.at(0, 0, m), c.truth.mu.at(0, 0, m)));
                worst = std::max(worst, rel(sig.at(0, 0, m), c.truth.sigma.at(0, 0, m)));
            }
        }
        const double sec = t7.seconds();
        ok = ok && worst < 1e-7 && sec < 300.0;
        report("C7", ok, "parameter round-trip (complex sigma), orders 0..3: max rel err " + fmt(worst), sec);
    }
}

// ---------------------------------------------------------------- C8
void criterion8() {
    Timer t;
    const Scenario s = make_random_scenario(777, 5, 3);
    const ForwardTables ft = forward_pipeline(s);
    // single-mode plane wave matches sym_eval
    const std::size_t n = 256;
    BoundaryField f;
    f.n1 = f.n2 = n;
    f.a.assign(n * n, Cplx(0.0));
    f.b.assign(n * n, Cplx(0.0));
    const int k1 = 5, k2 = -9;
    for (std::size_t i2 = 0; i2 < n; ++i2)
        for (std::size_t i1 = 0; i1 < n; ++i1) {
            const double x1 = 2.0 * M_PI * double(i1) / double(n);
            const double x2 = 2.0 * M_PI * double(i2) / double(n);
            f.a[i2 * n + i1] = std::exp(Cplx(0.0, k1 * x1 + k2 * x2));
            f.b[i2 * n + i1] = 0.7 * std::exp(Cplx(0.0, k1 * x1 + k2 * x2));
        }
    const BoundaryField out = apply_dtn(ft.psi, f, 3, 2);
    Cplx m[4] = {0, 0, 0, 0};
    for (int d = 1; d >= -1; --d) {
        const auto v = sym_eval(ft.psi.at(d), double(k1), double(k2));
        for (int e = 0; e < 4; ++e) m[e] += v[e];
    }
    double plane_err = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) {
        plane_err = std::max(plane_err, std::abs(out.a[i] - (m[0] * f.a[i] + m[1] * f.b[i])));
        plane_err = std::max(plane_err, std::abs(out.b[i] - (m[2] * f.a[i] + m[3] * f.b[i])));
    }
    // linearity on the same grid
    std::mt19937_64 rng(31337);
    BoundaryField u = f, v = f, w = f;
    for (std::size_t i = 0; i < n * n; ++i) {
        auto rnd = [&] { return Cplx(double(rng() >> 11) * 0x1.0p-53 - 0.5, double(rng() >> 11) * 0x1.0p-53 - 0.5); };
        u.a[i] = rnd();
        u.b[i] = rnd();
        v.a[i] = rnd();
        v.b[i] = rnd();
        w.a[i] = u.a[i] + Cplx(0.0, 2.0) * v.a[i];
        w.b[i] = u.b[i] + Cplx(0.0, 2.0) * v.b[i];
    }
    const BoundaryField au = apply_dtn(ft.psi, u, 3, 2);
    const BoundaryField av = apply_dtn(ft.psi, v, 3, 2);
    const BoundaryField aw = apply_dtn(ft.psi, w, 3, 2);
    double lin_err = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) {
        lin_err = std::max(lin_err, std::abs(aw.a[i] - au.a[i] - Cplx(0.0, 2.0) * av.a[i]));
        lin_err = std::max(lin_err, std::abs(aw.b[i] - au.b[i] - Cplx(0.0, 2.0) * av.b[i]));
    }
    // homogeneity of each degree slot under xi-scaling across grid modes
    double hom_err = 0.0;
    for (int d = 1; d >= -1; --d) {
        for (const auto& mode : {std::pair<int, int>{3, 4}, {7, -2}, {-5, 11}}) {
            const auto v1 = sym_eval(ft.psi.at(d), 2.0 * mode.first, 2.0 * mode.second);
            const auto v0 = sym_eval(ft.psi.at(d), mode.first, mode.second);
            for (int e = 0; e < 4; ++e)
                hom_err = std::max(hom_err, std::abs(v1[e] - std::pow(2.0, d) * v0[e]) /
                                                std::max(1e-12, std::abs(v0[e])));
        }
    }
    const double sec = t.seconds();
    report("C8",
           plane_err < 1e-12 && lin_err < 1e-11 && hom_err < 1e-10 && sec < 5.0,
           "Fourier multiplier on 256^2: plane-wave err " + fmt(plane_err) + ", linearity " + fmt(lin_err) +
               ", homogeneity " + fmt(hom_err),
           sec);
}

// ---------------------------------------------------------------- C9
void criterion9() {
    Timer t;
    std::mt19937_64 rng(999);
    auto rnd = [&] { return double(rng() >> 11) * 0x1.0p-53 - 0.5; };
    const double omega = 1.3, mu = 1.1;
    const Cplx sigma(0.9, 0.25);
    const Cplx k2 = omega * omega * mu * sigma;
    double fd_worst = 0.0, rec_worst = 0.0;
    const double h = 1e-3;
    for (int rep = 0; rep < 20; ++rep) {
        const std::array<double, 3> y{rnd(), rnd(), rnd()};
        std::array<double, 3> x{y[0] + 1.2 + 0.3 * rnd(), y[1] + 0.4 * rnd(), y[2] + 0.4 * rnd()};
        auto evalG = [&](const std::array<double, 3>& p) { return classical_dyadic_green(omega, mu, sigma, p, y); };
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
        double res = 0.0, scale = 0.0;
        for (int col = 0; col < 3; ++col) {
            auto cc = curl_num(curlG, x, col);
            for (int row = 0; row < 3; ++row) {
                res = std::max(res, std::abs(cc[row] - k2 * G[row][col]));
                scale = std::max(scale, std::abs(k2 * G[row][col]));
            }
        }
        fd_worst = std::max(fd_worst, res / scale);
        const auto Gxy = classical_dyadic_green(omega, mu, sigma, x, y);
        const auto Gyx = classical_dyadic_green(omega, mu, sigma, y, x);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) rec_worst = std::max(rec_worst, std::abs(Gxy[i][j] - Gyx[j][i]));
    }
    report("C9", fd_worst < 1e-4 && rec_worst < 1e-10,
           "dyadic Green helper: curl curl residual " + fmt(fd_worst) + " (rel), reciprocity " + fmt(rec_worst),
           t.seconds());
}

// ---------------------------------------------------------------- C10
void criterion10() {
    Timer t;
    bool ok = true;
    std::string detail;
    const std::string scn = "/tmp/emdtn_acc.scn", sym1 = "/tmp/emdtn_acc1.sym", sym2 = "/tmp/emdtn_acc2.sym";
    save_scenario(scn, make_random_scenario(4242, 5, 4));
    {
        SymbolsOptions opt;
        opt.scenario_path = scn;
        opt.out_path = sym1;
        std::ostringstream os;
        ok = ok && cmd_symbols(opt, os) == 0;
        opt.out_path = sym2;
        ok = ok && cmd_symbols(opt, os) == 0;
        ok = ok && read_file(sym1) == read_file(sym2);
    }
    {
        const Scenario s = load_scenario(scn);
        ok = ok && scenario_to_text(scenario_from_text(scenario_to_text(s))) == scenario_to_text(s);
        double omega = 0.0;
        const SymbolTable tab = load_symbols(sym1, &omega);
        ok = ok && symbols_to_text(tab, omega) == read_file(sym1);
    }
    std::remove(scn.c_str());
    std::remove(sym1.c_str());
    std::remove(sym2.c_str());
    report("C10", ok, "determinism: byte-identical symbol files, lossless scenario/symbol round-trips", t.seconds());
}

}  // namespace

int main() {
    std::printf("emdtn acceptance suite\n");
    criterion1();
    criteria234();
    criterion5();
    criteria67();
    criterion8();
    criterion9();
    criterion10();
    std::printf("%s: %d failure(s)\n", g_failures == 0 ? "PASS" : "FAIL", g_failures);
    return g_failures == 0 ? 0 : 1;
}
