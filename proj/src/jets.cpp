#include "jets.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "kernels/kernels.hpp"

namespace emdtn {

namespace {

inline std::size_t tri(int n) { return static_cast<std::size_t>(n) * (n + 1) / 2; }

inline void check_order(int order) {
    assert(order >= 0 && order <= kMaxJetOrder);
    (void)order;
}

}  // namespace

std::size_t Jet3::coeff_count(int order) {
    std::size_t n = 0;
    for (int k3 = 0; k3 <= order; ++k3) n += tri(order - k3 + 1);
    return n;
}

std::size_t Jet3::row_base(int k3, int k2) const {
    std::size_t base = 0;
    for (int t3 = 0; t3 < k3; ++t3) base += tri(order_ - t3 + 1);
    // rows (k3, 0..k2-1) have lengths order-k3+1, order-k3, ...
    if (k2 > 0) base += static_cast<std::size_t>(k2) * (order_ - k3 + 1) - tri(k2 - 1);
    return base;
}

Jet3::Jet3(int order) : order_(order), c_(coeff_count(order), Cplx(0.0)) { check_order(order); }

Jet3 Jet3::constant(int order, Cplx value) {
    Jet3 j(order);
    j.c_[0] = value;
    return j;
}

Jet3 Jet3::variable(int order, int axis, Cplx scale) {
    assert(order >= 1 && axis >= 1 && axis <= 3);
    Jet3 j(order);
    if (axis == 1) j.set(1, 0, 0, scale);
    if (axis == 2) j.set(0, 1, 0, scale);
    if (axis == 3) j.set(0, 0, 1, scale);
    return j;
}

Cplx Jet3::at(int k1, int k2, int k3) const {
    assert(k1 >= 0 && k2 >= 0 && k3 >= 0);
    if (k1 + k2 + k3 > order_) return Cplx(0.0);
    return c_[row_base(k3, k2) + k1];
}

void Jet3::set(int k1, int k2, int k3, Cplx v) {
    assert(k1 + k2 + k3 <= order_);
    c_[row_base(k3, k2) + k1] = v;
}

Jet3 Jet3::truncated(int order) const {
    if (order >= order_) return *this;
    Jet3 out(order);
    for (int k3 = 0; k3 <= order; ++k3)
        for (int k2 = 0; k2 + k3 <= order; ++k2) {
            const std::size_t src = row_base(k3, k2);
            const std::size_t dst = out.row_base(k3, k2);
            std::copy_n(c_.begin() + src, order - k3 - k2 + 1, out.c_.begin() + dst);
        }
    return out;
}

Jet3 Jet3::restrict_boundary() const {
    Jet3 out(order_);
    const std::size_t n = tri(order_ + 1);
    std::copy_n(c_.begin(), n, out.c_.begin());
    return out;
}

Jet3 Jet3::operator-() const {
    Jet3 out = *this;
    for (auto& v : out.c_) v = -v;
    return out;
}

Jet3& Jet3::operator+=(const Jet3& rhs) {
    if (rhs.order_ < order_) *this = truncated(rhs.order_);
    if (rhs.order_ == order_) {
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += rhs.c_[i];
    } else {
        Jet3 r = rhs.truncated(order_);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += r.c_[i];
    }
    return *this;
}

Jet3& Jet3::operator-=(const Jet3& rhs) {
    if (rhs.order_ < order_) *this = truncated(rhs.order_);
    if (rhs.order_ == order_) {
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= rhs.c_[i];
    } else {
        Jet3 r = rhs.truncated(order_);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= r.c_[i];
    }
    return *this;
}

Jet3& Jet3::operator*=(Cplx s) {
    kernels::cscale(c_.data(), s, c_.size());
    return *this;
}

Jet3 operator+(const Jet3& a, const Jet3& b) {
    Jet3 out = a;
    out += b;
    return out;
}

Jet3 operator-(const Jet3& a, const Jet3& b) {
    Jet3 out = a;
    out -= b;
    return out;
}

Jet3 operator*(Cplx s, const Jet3& a) {
    Jet3 out = a;
    out *= s;
    return out;
}

Jet3 operator*(const Jet3& a, Cplx s) { return s * a; }

Jet3 operator*(const Jet3& a, const Jet3& b) { return jet_mul(a, b); }

Jet3 jet_mul(const Jet3& a, const Jet3& b) {
    const int n = std::min(a.order(), b.order());
    const Jet3 aa = a.truncated(n);
    const Jet3 bb = b.truncated(n);
    Jet3 out(n);
    for (int i3 = 0; i3 <= n; ++i3) {
        for (int i2 = 0; i2 + i3 <= n; ++i2) {
            const std::size_t abase = aa.row_base(i3, i2);
            for (int i1 = 0; i1 + i2 + i3 <= n; ++i1) {
                const Cplx av = aa.data()[abase + i1];
                if (av == Cplx(0.0)) continue;
                const int ideg = i1 + i2 + i3;
                for (int j3 = 0; j3 <= n - ideg; ++j3) {
                    for (int j2 = 0; j2 + j3 <= n - ideg; ++j2) {
                        const std::size_t len = static_cast<std::size_t>(n - ideg - j3 - j2) + 1;
                        Cplx* dst = out.data() + out.row_base(i3 + j3, i2 + j2) + i1;
                        const Cplx* src = bb.data() + bb.row_base(j3, j2);
                        kernels::caxpy(dst, av, src, len);
                    }
                }
            }
        }
    }
    return out;
}

Jet3 jet_inv(const Jet3& a) {
    const Cplx a0 = a.value();
    if (std::abs(a0) < 1e-300) throw ZeroLeadingCoefficient("jet_inv: constant term is (numerically) zero");
    const int n = a.order();
    // 1/a = (1/a0) * sum_k (-u)^k with u = a/a0 - 1 nilpotent at order n.
    Jet3 u = (Cplx(1.0) / a0) * a;
    u.set(0, 0, 0, u.value() - Cplx(1.0));
    Jet3 acc = Jet3::constant(n, Cplx(1.0));
    Jet3 term = Jet3::constant(n, Cplx(1.0));
    for (int k = 1; k <= n; ++k) {
        term = jet_mul(term, u);
        term *= Cplx(-1.0);
        acc += term;
    }
    acc *= Cplx(1.0) / a0;
    return acc;
}

Jet3 jet_sqrt(const Jet3& a) {
    const Cplx a0 = a.value();
    if (!(a0.real() > 1e-300) || std::abs(a0.imag()) > 1e-12 * std::max(1.0, std::abs(a0)))
        throw NonPositiveLeadingCoefficient("jet_sqrt: constant term must be real and positive");
    const int n = a.order();
    const double s0 = std::sqrt(a0.real());
    Jet3 u = (Cplx(1.0) / a0) * a;
    u.set(0, 0, 0, u.value() - Cplx(1.0));
    // sqrt(1+u) = sum_k binom(1/2, k) u^k
    Jet3 acc = Jet3::constant(n, Cplx(1.0));
    Jet3 upow = Jet3::constant(n, Cplx(1.0));
    double coeff = 1.0;
    for (int k = 1; k <= n; ++k) {
        coeff *= (0.5 - (k - 1)) / k;
        upow = jet_mul(upow, u);
        acc += Cplx(coeff) * upow;
    }
    acc *= Cplx(s0);
    return acc;
}

Jet3 jet_diff(const Jet3& a, int axis) {
    assert(axis >= 1 && axis <= 3);
    const int n = a.order();
    if (n == 0) throw JetOrderExhausted("jet_diff: jet of order 0 has no represented derivative");
    Jet3 out(n - 1);
    for (int k3 = 0; k3 <= n - 1; ++k3) {
        for (int k2 = 0; k2 + k3 <= n - 1; ++k2) {
            for (int k1 = 0; k1 + k2 + k3 <= n - 1; ++k1) {
                Cplx v;
                if (axis == 1)
                    v = Cplx(double(k1 + 1)) * a.at(k1 + 1, k2, k3);
                else if (axis == 2)
                    v = Cplx(double(k2 + 1)) * a.at(k1, k2 + 1, k3);
                else
                    v = Cplx(double(k3 + 1)) * a.at(k1, k2, k3 + 1);
                out.set(k1, k2, k3, v);
            }
        }
    }
    return out;
}

Cplx Jet3::eval(double x1, double x2, double x3) const {
    Cplx sum(0.0);
    for (int k3 = 0; k3 <= order_; ++k3) {
        double p3 = std::pow(x3, k3);
        for (int k2 = 0; k2 + k3 <= order_; ++k2) {
            double p23 = p3 * std::pow(x2, k2);
            const std::size_t base = row_base(k3, k2);
            double p = p23;
            for (int k1 = 0; k1 + k2 + k3 <= order_; ++k1) {
                sum += c_[base + k1] * Cplx(p);
                p *= x1;
            }
        }
    }
    return sum;
}

bool Jet3::is_zero(double tol) const { return max_abs() <= tol; }

double Jet3::max_abs() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
}

double max_abs_diff(const Jet3& a, const Jet3& b) {
    const int n = std::min(a.order(), b.order());
    double m = 0.0;
    for (int k3 = 0; k3 <= n; ++k3)
        for (int k2 = 0; k2 + k3 <= n; ++k2)
            for (int k1 = 0; k1 + k2 + k3 <= n; ++k1) m = std::max(m, std::abs(a.at(k1, k2, k3) - b.at(k1, k2, k3)));
    return m;
}

}  // namespace emdtn
