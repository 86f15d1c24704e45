#pragma once

// Matrix-valued homogeneous symbols in xi' = (xi1, xi2) with Jet3
// coefficients. Elements live in the quotient algebra
//   Jet3[xi1, xi2, w] / (w^2 - Q),  Q = sum g^{ab} xi_a xi_b,
// with explicit Q^{-k} denominators, so the recursions can take exact
// xi- and x-derivatives of non-polynomial symbols. w evaluates to +sqrt(Q).

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jets.hpp"

namespace emdtn {

// Everything a symbol needs to know about its scenario: the inverse metric
// block defining Q and the jet order. Symbols from different contexts must
// not be mixed.
struct QContext {
    int order = 0;
    Jet3 up11, up12, up22;  // g^{11}, g^{12}, g^{22}
    Jet3 up11_inv;          // cached for division by Q
};

using Ctx = std::shared_ptr<const QContext>;

struct TermKey {
    int d1 = 0, d2 = 0, e = 0;  // xi1^d1 xi2^d2 w^e, e in {0,1}
    friend bool operator<(const TermKey& a, const TermKey& b) {
        if (a.d1 != b.d1) return a.d1 < b.d1;
        if (a.d2 != b.d2) return a.d2 < b.d2;
        return a.e < b.e;
    }
    friend bool operator==(const TermKey& a, const TermKey& b) { return a.d1 == b.d1 && a.d2 == b.d2 && a.e == b.e; }
};

class WPoly {
  public:
    WPoly() = default;

    void add_term(int d1, int d2, int e, const Jet3& coeff);
    const std::map<TermKey, Jet3>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    void drop_exact_zeros();

    WPoly& operator+=(const WPoly& rhs);
    WPoly& operator-=(const WPoly& rhs);
    friend WPoly operator+(const WPoly& a, const WPoly& b);
    friend WPoly operator-(const WPoly& a, const WPoly& b);
    WPoly scaled(Cplx s) const;
    WPoly scaled(const Jet3& s) const;

    double max_abs() const;
    int max_xi_degree() const;  // d1 + d2 + e over terms, -1 if empty

  private:
    std::map<TermKey, Jet3> terms_;
};

// Product in the quotient ring (w^2 rewritten to Q via the context).
WPoly wpoly_mul(const Ctx& ctx, const WPoly& a, const WPoly& b);
WPoly wpoly_mul_q(const Ctx& ctx, const WPoly& a);  // multiply by Q
// Exact division by Q if the remainder vanishes numerically; nullopt
// otherwise.
std::optional<WPoly> wpoly_divide_q(const Ctx& ctx, const WPoly& a);

class SymbolElement {
  public:
    SymbolElement() = default;
    SymbolElement(Ctx ctx, int rows, int cols, int degree);

    static SymbolElement make(const Ctx& ctx, int rows, int cols, int degree, int qpow);
    static SymbolElement scalar(const Ctx& ctx, const WPoly& num, int qpow, int degree);
    static SymbolElement identity(const Ctx& ctx, int n);       // degree 0
    static SymbolElement weight(const Ctx& ctx);                // scalar w, degree 1
    static SymbolElement xi(const Ctx& ctx, int axis);          // scalar xi_axis, degree 1
    static SymbolElement from_jet(const Ctx& ctx, const Jet3& f);  // scalar multiplier

    const Ctx& ctx() const { return ctx_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int degree() const { return degree_; }
    int q_power() const { return qpow_; }
    bool is_zero() const;

    WPoly& entry(int r, int c) { return num_[static_cast<std::size_t>(r) * cols_ + c]; }
    const WPoly& entry(int r, int c) const { return num_[static_cast<std::size_t>(r) * cols_ + c]; }

    SymbolElement extract(int r, int c) const;  // 1x1 sub-element
    SymbolElement transpose() const;
    // rows x cols element whose (r, c) entry is this 1x1 element.
    SymbolElement embed(int rows, int cols, int r, int c) const;

    SymbolElement operator-() const;
    friend SymbolElement operator+(const SymbolElement& a, const SymbolElement& b);
    friend SymbolElement operator-(const SymbolElement& a, const SymbolElement& b);

    SymbolElement scaled(Cplx s) const;
    SymbolElement scaled(const Jet3& s) const;

    double max_abs() const;
    // Factor out common Q powers and drop exact-zero terms.
    void canonicalize();
    // Degree homogeneity check: every stored term satisfies
    // d1 + d2 + e == degree + 2 qpow.
    bool degree_consistent() const;

  private:
    Ctx ctx_;
    int rows_ = 0, cols_ = 0;
    int degree_ = 0;
    int qpow_ = 0;
    std::vector<WPoly> num_;

    friend SymbolElement sym_mul(const SymbolElement&, const SymbolElement&);
    friend SymbolElement sym_dxi(const SymbolElement&, int);
    friend SymbolElement sym_dx(const SymbolElement&, int);
};

SymbolElement sym_mul(const SymbolElement& a, const SymbolElement& b);
// d/d xi_m, m in {1,2}; the degree drops by one.
SymbolElement sym_dxi(const SymbolElement& a, int m);
// d/d x_l, l in {1,2,3}; same degree, jet order drops by one.
SymbolElement sym_dx(const SymbolElement& a, int l);

// Numeric evaluation at the base point x = 0 with w -> +sqrt(Q(xi')).
std::vector<Cplx> sym_eval(const SymbolElement& a, double xi1, double xi2);
// Evaluation at numeric xi' keeping the full jet in x.
std::vector<Jet3> sym_eval_jet(const SymbolElement& a, double xi1, double xi2);

// Ordered slots of one operator: degrees top, top-1, ..., lowest.
struct SymbolTable {
    std::string name;
    int rows = 0, cols = 0;
    int top = 0;
    // True when the operator genuinely has no slots below lowest()
    // (multiplication operators, differential-operator symbols); false for
    // truncated infinite expansions like phi and q.
    bool complete_below = false;
    std::vector<SymbolElement> slots;

    int lowest() const { return top - static_cast<int>(slots.size()) + 1; }
    bool has(int degree) const { return degree <= top && degree >= lowest(); }
    const SymbolElement& at(int degree) const { return slots[static_cast<std::size_t>(top - degree)]; }
    SymbolElement& at(int degree) { return slots[static_cast<std::size_t>(top - degree)]; }
    SymbolTable extract(int r, int c) const;  // table of one matrix entry
};

// Full-symbol composition sum_theta (-i)^|theta|/theta!
// (d^theta_xi A)(d^theta_x B), graded; slots computed down to out_lowest.
// Slots below max(A.lowest + B.top, A.top + B.lowest) would need unavailable
// input slots; requesting them throws InsufficientDepth.
SymbolTable sym_compose(const SymbolTable& a, const SymbolTable& b, int out_lowest, const std::string& name = "");

// Left multiplication by a function (matrix of jets); exact, no corrections.
SymbolTable sym_left_mul(const std::vector<Jet3>& f, int frows, int fcols, const SymbolTable& b,
                         const std::string& name = "");
// Composition with a multiplication operator on the right (full theta sum).
SymbolTable sym_right_mul_op(const SymbolTable& a, const std::vector<Jet3>& f, int frows, int fcols, int out_lowest,
                             const std::string& name = "");

SymbolTable table_add(const SymbolTable& a, const SymbolTable& b, const std::string& name = "");
SymbolTable table_neg(const SymbolTable& a);
// Restrict every jet coefficient to the boundary x3 = 0.
SymbolTable table_restrict_boundary(const SymbolTable& a);

}  // namespace emdtn
