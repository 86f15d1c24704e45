#include "geometry.hpp"

#include <cmath>

namespace emdtn {

namespace {

constexpr double kPi = 3.14159265358979323846;

Jet3 d(const Jet3& f, int axis0) { return jet_diff(f, axis0 + 1); }

}  // namespace

MetricData build_metric(const BoundaryMetricJet& g) {
    MetricData m;
    m.order = std::min(g.g11.order(), std::min(g.g12.order(), g.g22.order()));
    const Jet3 g11 = g.g11.truncated(m.order);
    const Jet3 g12 = g.g12.truncated(m.order);
    const Jet3 g22 = g.g22.truncated(m.order);

    m.det2 = g11 * g22 - g12 * g12;
    if (!(g11.value().real() > 0.0) || !(m.det2.value().real() > 0.0))
        throw NonPositiveDefinite("metric block is not positive definite at the base point");

    const Jet3 zero = Jet3::constant(m.order, 0.0);
    const Jet3 one = Jet3::constant(m.order, 1.0);
    m.lo[0][0] = g11;
    m.lo[0][1] = m.lo[1][0] = g12;
    m.lo[1][1] = g22;
    m.lo[0][2] = m.lo[2][0] = m.lo[1][2] = m.lo[2][1] = zero;
    m.lo[2][2] = one;

    const Jet3 inv_det = jet_inv(m.det2);
    m.up[0][0] = g22 * inv_det;
    m.up[1][1] = g11 * inv_det;
    m.up[0][1] = m.up[1][0] = -g12 * inv_det;
    m.up[0][2] = m.up[2][0] = m.up[1][2] = m.up[2][1] = zero;
    m.up[2][2] = one;

    m.sqrt_det = jet_sqrt(m.det2);
    m.inv_sqrt_det = jet_inv(m.sqrt_det);
    return m;
}

ChristoffelJet christoffel(const MetricData& m) {
    ChristoffelJet c;
    const int n = m.order - 1;
    Jet3 dlo[3][3][3];  // dlo[k][m][l] = d_l g_{km}
    for (int k = 0; k < 3; ++k)
        for (int mm = 0; mm < 3; ++mm)
            for (int l = 0; l < 3; ++l) dlo[k][mm][l] = d(m.lo[k][mm], l);
    for (int j = 0; j < 3; ++j) {
        for (int l = 0; l < 3; ++l) {
            for (int k = l; k < 3; ++k) {
                Jet3 sum(n);
                for (int mm = 0; mm < 3; ++mm) {
                    Jet3 inner = dlo[k][mm][l] + dlo[l][mm][k] - dlo[l][k][mm];
                    sum += m.up[j][mm].truncated(n) * inner;
                }
                sum *= Cplx(0.5);
                c.G[j][l][k] = sum;
                c.G[j][k][l] = sum;
            }
        }
    }
    return c;
}

CurvatureJet curvature(const MetricData& m, const ChristoffelJet& gamma) {
    CurvatureJet out;
    const int n = m.order - 2;
    Jet3 dG[3][3][3][3];  // dG[j][k][m][l] = d_l Gamma^j_{km}
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            for (int mm = 0; mm < 3; ++mm)
                for (int l = 0; l < 3; ++l) dG[j][k][mm][l] = d(gamma.G[j][k][mm], l);
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            for (int l = 0; l < 3; ++l) {
                for (int mm = 0; mm < 3; ++mm) {
                    Jet3 r = dG[j][k][mm][l] - dG[j][k][l][mm];
                    for (int s = 0; s < 3; ++s)
                        r += gamma.G[j][s][l].truncated(n) * gamma.G[s][k][mm].truncated(n) -
                             gamma.G[j][s][mm].truncated(n) * gamma.G[s][k][l].truncated(n);
                    out.riem[j][k][l][mm] = r;
                }
            }
        }
    }
    for (int k = 0; k < 3; ++k)
        for (int mm = 0; mm < 3; ++mm) {
            Jet3 r(n);
            for (int j = 0; j < 3; ++j) r += out.riem[j][k][j][mm];
            out.ricci[k][mm] = r;
        }
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            Jet3 r(n);
            for (int mm = 0; mm < 3; ++mm) r += m.up[j][mm].truncated(n) * out.ricci[mm][k];
            out.mixed[j][k] = r;
        }
    return out;
}

VectorFieldJet grad(const MetricData& m, const Jet3& f) {
    Jet3 df[3];
    for (int k = 0; k < 3; ++k) df[k] = d(f, k);
    VectorFieldJet out;
    for (int j = 0; j < 3; ++j) {
        Jet3 s = m.up[j][0] * df[0];
        s += m.up[j][1] * df[1];
        s += m.up[j][2] * df[2];
        out.X[j] = s;
    }
    return out;
}

Jet3 divergence(const MetricData& m, const VectorFieldJet& x) {
    int n = m.order;
    for (const auto& c : x.X) n = std::min(n, c.order());
    Jet3 s(n - 1);
    for (int j = 0; j < 3; ++j) s += d(m.sqrt_det * x.X[j], j);
    return m.inv_sqrt_det * s;
}

VectorFieldJet curl(const MetricData& m, const VectorFieldJet& x) {
    Jet3 lowered[3];
    for (int j = 0; j < 3; ++j) {
        Jet3 s = m.lo[j][0] * x.X[0];
        s += m.lo[j][1] * x.X[1];
        s += m.lo[j][2] * x.X[2];
        lowered[j] = s;
    }
    VectorFieldJet out;
    out.X[0] = m.inv_sqrt_det * (d(lowered[2], 1) - d(lowered[1], 2));
    out.X[1] = m.inv_sqrt_det * (d(lowered[0], 2) - d(lowered[2], 0));
    out.X[2] = m.inv_sqrt_det * (d(lowered[1], 0) - d(lowered[0], 1));
    return out;
}

Jet3 laplace_beltrami(const MetricData& m, const Jet3& f) { return divergence(m, grad(m, f)); }

VectorFieldJet cross_contravariant(const MetricData& m, const VectorFieldJet& e, const VectorFieldJet& f) {
    Jet3 minor[3];
    minor[0] = e.X[1] * f.X[2] - e.X[2] * f.X[1];
    minor[1] = e.X[2] * f.X[0] - e.X[0] * f.X[2];
    minor[2] = e.X[0] * f.X[1] - e.X[1] * f.X[0];
    VectorFieldJet out;
    for (int k = 0; k < 3; ++k) {
        Jet3 s = m.up[0][k] * minor[0];
        s += m.up[1][k] * minor[1];
        s += m.up[2][k] * minor[2];
        out.X[k] = m.sqrt_det * s;
    }
    return out;
}

VectorFieldJet cross_covariant(const MetricData& m, const VectorFieldJet& e, const VectorFieldJet& f) {
    Jet3 el[3], fl[3];
    for (int j = 0; j < 3; ++j) {
        el[j] = m.lo[j][0] * e.X[0] + m.lo[j][1] * e.X[1] + m.lo[j][2] * e.X[2];
        fl[j] = m.lo[j][0] * f.X[0] + m.lo[j][1] * f.X[1] + m.lo[j][2] * f.X[2];
    }
    VectorFieldJet out;
    out.X[0] = m.inv_sqrt_det * (el[1] * fl[2] - el[2] * fl[1]);
    out.X[1] = m.inv_sqrt_det * (el[2] * fl[0] - el[0] * fl[2]);
    out.X[2] = m.inv_sqrt_det * (el[0] * fl[1] - el[1] * fl[0]);
    return out;
}

Jet3 connection_block(const MetricData& m, const ChristoffelJet& gamma, int j, int k) {
    const int n = m.order - 2;
    Jet3 s(n);
    for (int l = 0; l < 3; ++l) {
        for (int mm = 0; mm < 3; ++mm) {
            Jet3 inner = d(gamma.G[j][k][mm], l);
            for (int h = 0; h < 3; ++h)
                inner += gamma.G[j][h][l].truncated(n) * gamma.G[h][k][mm].truncated(n) -
                         gamma.G[j][k][h].truncated(n) * gamma.G[h][mm][l].truncated(n);
            s += m.up[mm][l].truncated(n) * inner;
        }
    }
    return s;
}

VectorFieldJet curl_curl_identity_residual(const MetricData& m, const ChristoffelJet& gamma, const CurvatureJet& curv,
                                           const VectorFieldJet& x) {
    const VectorFieldJet lhs = curl(m, curl(m, x));
    const Jet3 div_x = divergence(m, x);
    const VectorFieldJet grad_div = grad(m, div_x);
    VectorFieldJet res;
    for (int j = 0; j < 3; ++j) {
        Jet3 bundle = laplace_beltrami(m, x.X[j]);
        for (int k = 0; k < 3; ++k) {
            for (int l = 0; l < 3; ++l) {
                for (int mm = 0; mm < 3; ++mm) {
                    bundle += Cplx(2.0) * (m.up[mm][l] * gamma.G[j][k][mm] * d(x.X[k], l));
                    bundle += m.up[mm][l] * d(gamma.G[j][k][mm], l) * x.X[k];
                    for (int h = 0; h < 3; ++h) {
                        bundle += m.up[mm][l] * gamma.G[j][h][l] * gamma.G[h][k][mm] * x.X[k];
                        bundle -= m.up[mm][l] * gamma.G[j][k][h] * gamma.G[h][mm][l] * x.X[k];
                    }
                }
            }
            bundle -= curv.mixed[j][k] * x.X[k];
        }
        res.X[j] = lhs.X[j] - (grad_div.X[j] - bundle);
    }
    return res;
}

VectorFieldJet maxwell_second_order(const MetricData& m, const Jet3& mu, const Jet3& sigma, double omega,
                                    const VectorFieldJet& e) {
    const VectorFieldJet curl_e = curl(m, e);
    const VectorFieldJet ccurl = curl(m, curl_e);
    VectorFieldJet grad_log_mu = grad(m, mu);
    const Jet3 mu_inv = jet_inv(mu);
    for (auto& c : grad_log_mu.X) c = mu_inv * c;
    const VectorFieldJet mu_term = cross_contravariant(m, grad_log_mu, curl_e);
    const Jet3 factor = Cplx(omega * omega) * (mu * sigma);
    VectorFieldJet out;
    for (int j = 0; j < 3; ++j) out.X[j] = ccurl.X[j] - mu_term.X[j] - factor * e.X[j];
    return out;
}

VectorFieldJet grad_div_substitution(const MetricData& m, const Jet3& sigma, const VectorFieldJet& e) {
    const Jet3 sigma_inv = jet_inv(sigma);
    int n = m.order;
    for (const auto& c : e.X) n = std::min(n, c.order());
    Jet3 s(n - 1);
    for (int l = 0; l < 3; ++l) s += sigma_inv * d(sigma, l) * e.X[l];
    VectorFieldJet g = grad(m, s);
    for (auto& c : g.X) c = -c;
    return g;
}

std::array<std::array<Cplx, 3>, 3> classical_dyadic_green(double omega, double mu, Cplx sigma,
                                                          const std::array<double, 3>& x,
                                                          const std::array<double, 3>& y) {
    const double rx = y[0] - x[0], ry = y[1] - x[1], rz = y[2] - x[2];
    const double r2 = rx * rx + ry * ry + rz * rz;
    if (r2 < 1e-24) throw CoincidentPoints("classical_dyadic_green: x == y");
    const double r = std::sqrt(r2);
    const double rhat[3] = {rx / r, ry / r, rz / r};
    const Cplx k = omega * std::sqrt(Cplx(mu) * sigma);
    const Cplx ik = Cplx(0.0, 1.0) * k;
    const Cplx g = std::exp(ik * r) / (4.0 * kPi * r);
    const Cplx gp = g * (ik - 1.0 / r);                             // g'(r)
    const Cplx gpp = g * ((ik - 1.0 / r) * (ik - 1.0 / r) + 1.0 / r2);  // g''(r)
    const Cplx k2 = omega * omega * mu * sigma;
    std::array<std::array<Cplx, 3>, 3> out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double delta = i == j ? 1.0 : 0.0;
            const Cplx hess = (delta - rhat[i] * rhat[j]) * gp / r + rhat[i] * rhat[j] * gpp;
            out[i][j] = delta * g + hess / k2;
        }
    }
    return out;
}

}  // namespace emdtn
