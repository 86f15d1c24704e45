#pragma once

// Truncated multivariate Taylor series in (x1, x2, x3) with complex
// coefficients, the coefficient ring of the whole library. Storage is dense:
// at the orders used here a jet never exceeds a few hundred coefficients and
// the Cauchy-product loop runs over contiguous x1-rows, which is what the
// kernels layer accelerates.
//
// Coefficients are Taylor coefficients, i.e. f = sum c[k] x^k, so the k-th
// partial derivative at 0 is k! * c[k].

#include <complex>
#include <vector>

#include "errors.hpp"

namespace emdtn {

using Cplx = std::complex<double>;

constexpr int kMaxJetOrder = 8;

class Jet3 {
  public:
    Jet3() : order_(0), c_(1, Cplx(0.0)) {}
    explicit Jet3(int order);

    static Jet3 constant(int order, Cplx value);
    // x_axis with axis in {1,2,3}; requires order >= 1.
    static Jet3 variable(int order, int axis, Cplx scale = Cplx(1.0));

    int order() const { return order_; }
    std::size_t size() const { return c_.size(); }

    Cplx at(int k1, int k2, int k3) const;
    void set(int k1, int k2, int k3, Cplx v);
    Cplx value() const { return c_[0]; }  // coefficient of x^0

    const Cplx* data() const { return c_.data(); }
    Cplx* data() { return c_.data(); }

    Jet3 truncated(int order) const;  // lower the order (no-op if equal)
    // Drop all terms with k3 > 0 (restriction to the boundary x3 = 0).
    Jet3 restrict_boundary() const;

    Jet3 operator-() const;
    Jet3& operator+=(const Jet3& rhs);
    Jet3& operator-=(const Jet3& rhs);
    Jet3& operator*=(Cplx s);

    friend Jet3 operator+(const Jet3& a, const Jet3& b);
    friend Jet3 operator-(const Jet3& a, const Jet3& b);
    friend Jet3 operator*(const Jet3& a, const Jet3& b);
    friend Jet3 operator*(Cplx s, const Jet3& a);
    friend Jet3 operator*(const Jet3& a, Cplx s);

    Cplx eval(double x1, double x2, double x3) const;

    bool is_zero(double tol = 0.0) const;
    double max_abs() const;

    // Row layout helpers: coefficients with fixed (k3, k2) are contiguous in
    // k1. base(k3,k2) is the offset of (0,k2,k3); the row has
    // order-k3-k2+1 entries.
    static std::size_t coeff_count(int order);
    std::size_t row_base(int k3, int k2) const;

  private:
    int order_;
    std::vector<Cplx> c_;
};

// Cauchy product truncated at min(order(a), order(b)).
Jet3 jet_mul(const Jet3& a, const Jet3& b);
inline Jet3 jet_add(const Jet3& a, const Jet3& b) { return a + b; }

// Reciprocal; requires |a(0)| > 1e-300.
Jet3 jet_inv(const Jet3& a);

// Principal square root; requires a(0) real and positive.
Jet3 jet_sqrt(const Jet3& a);

// Formal partial derivative along axis in {1,2,3}; the order drops by one.
// Throws JetOrderExhausted at order 0 (the derivative is not represented).
Jet3 jet_diff(const Jet3& a, int axis);

double max_abs_diff(const Jet3& a, const Jet3& b);

}  // namespace emdtn
