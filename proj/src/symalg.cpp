#include "symalg.hpp"

#include <cassert>
#include <cmath>
#include <functional>
#include <tuple>

#include "errors.hpp"

namespace emdtn {

namespace {

// Relative remainder threshold for exact division by Q. True divisibility
// leaves a remainder at rounding level; anything else is O(1) relative.
constexpr double kDivideQTol = 1e-10;

void check_same_ctx(const Ctx& a, const Ctx& b) {
    if (a.get() != b.get()) throw ScenarioMismatch("symbols belong to different scenarios");
}

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

}  // namespace

void WPoly::add_term(int d1, int d2, int e, const Jet3& coeff) {
    assert(e == 0 || e == 1);
    auto [it, inserted] = terms_.try_emplace(TermKey{d1, d2, e}, coeff);
    if (!inserted) it->second += coeff;
}

void WPoly::drop_exact_zeros() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second.max_abs() == 0.0)
            it = terms_.erase(it);
        else
            ++it;
    }
}

WPoly& WPoly::operator+=(const WPoly& rhs) {
    for (const auto& [k, v] : rhs.terms_) add_term(k.d1, k.d2, k.e, v);
    return *this;
}

WPoly& WPoly::operator-=(const WPoly& rhs) {
    for (const auto& [k, v] : rhs.terms_) add_term(k.d1, k.d2, k.e, -v);
    return *this;
}

WPoly operator+(const WPoly& a, const WPoly& b) {
    WPoly out = a;
    out += b;
    return out;
}

WPoly operator-(const WPoly& a, const WPoly& b) {
    WPoly out = a;
    out -= b;
    return out;
}

WPoly WPoly::scaled(Cplx s) const {
    WPoly out;
    for (const auto& [k, v] : terms_) out.terms_.emplace(k, s * v);
    return out;
}

WPoly WPoly::scaled(const Jet3& s) const {
    WPoly out;
    for (const auto& [k, v] : terms_) out.terms_.emplace(k, s * v);
    return out;
}

double WPoly::max_abs() const {
    double m = 0.0;
    for (const auto& [k, v] : terms_) m = std::max(m, v.max_abs());
    return m;
}

int WPoly::max_xi_degree() const {
    int m = -1;
    for (const auto& [k, v] : terms_)
        if (v.max_abs() > 0.0) m = std::max(m, k.d1 + k.d2 + k.e);
    return m;
}

WPoly wpoly_mul(const Ctx& ctx, const WPoly& a, const WPoly& b) {
    WPoly out;
    for (const auto& [ka, va] : a.terms()) {
        for (const auto& [kb, vb] : b.terms()) {
            const Jet3 c = va * vb;
            const int e = ka.e + kb.e;
            const int d1 = ka.d1 + kb.d1;
            const int d2 = ka.d2 + kb.d2;
            if (e < 2) {
                out.add_term(d1, d2, e, c);
            } else {
                // w^2 -> Q
                out.add_term(d1 + 2, d2, 0, c * ctx->up11);
                out.add_term(d1 + 1, d2 + 1, 0, Cplx(2.0) * (c * ctx->up12));
                out.add_term(d1, d2 + 2, 0, c * ctx->up22);
            }
        }
    }
    out.drop_exact_zeros();
    return out;
}

WPoly wpoly_mul_q(const Ctx& ctx, const WPoly& a) {
    WPoly out;
    for (const auto& [k, v] : a.terms()) {
        out.add_term(k.d1 + 2, k.d2, k.e, v * ctx->up11);
        out.add_term(k.d1 + 1, k.d2 + 1, k.e, Cplx(2.0) * (v * ctx->up12));
        out.add_term(k.d1, k.d2 + 2, k.e, v * ctx->up22);
    }
    out.drop_exact_zeros();
    return out;
}

std::optional<WPoly> wpoly_divide_q(const Ctx& ctx, const WPoly& a) {
    const double scale = std::max(a.max_abs(), 1e-300);
    WPoly quot;
    for (int e = 0; e <= 1; ++e) {
        std::map<std::pair<int, int>, Jet3> rem;
        int maxd1 = -1;
        for (const auto& [k, v] : a.terms()) {
            if (k.e != e) continue;
            rem[{k.d1, k.d2}] = v;
            maxd1 = std::max(maxd1, k.d1);
        }
        for (int d1 = maxd1; d1 >= 2; --d1) {
            // collect keys first: we mutate rem below this d1 only
            std::vector<std::pair<int, int>> keys;
            for (const auto& [k, v] : rem)
                if (k.first == d1) keys.push_back(k);
            for (const auto& key : keys) {
                const Jet3 t = rem[key] * ctx->up11_inv;
                if (t.max_abs() == 0.0) {
                    rem.erase(key);
                    continue;
                }
                quot.add_term(d1 - 2, key.second, e, t);
                rem.erase(key);
                auto sub = [&](int dd1, int dd2, const Jet3& val) {
                    auto [it, inserted] = rem.try_emplace({dd1, dd2}, -val);
                    if (!inserted) it->second -= val;
                };
                sub(d1 - 1, key.second + 1, Cplx(2.0) * (t * ctx->up12));
                sub(d1 - 2, key.second + 2, t * ctx->up22);
            }
        }
        for (const auto& [k, v] : rem) {
            (void)k;
            if (v.max_abs() > kDivideQTol * scale) return std::nullopt;
        }
    }
    quot.drop_exact_zeros();
    return quot;
}

SymbolElement::SymbolElement(Ctx ctx, int rows, int cols, int degree)
    : ctx_(std::move(ctx)), rows_(rows), cols_(cols), degree_(degree), qpow_(0), num_(static_cast<std::size_t>(rows) * cols) {}

SymbolElement SymbolElement::make(const Ctx& ctx, int rows, int cols, int degree, int qpow) {
    SymbolElement e(ctx, rows, cols, degree);
    e.qpow_ = qpow;
    return e;
}

SymbolElement SymbolElement::scalar(const Ctx& ctx, const WPoly& num, int qpow, int degree) {
    SymbolElement e(ctx, 1, 1, degree);
    e.qpow_ = qpow;
    e.num_[0] = num;
    return e;
}

SymbolElement SymbolElement::identity(const Ctx& ctx, int n) {
    SymbolElement e(ctx, n, n, 0);
    WPoly one;
    one.add_term(0, 0, 0, Jet3::constant(ctx->order, 1.0));
    for (int i = 0; i < n; ++i) e.entry(i, i) = one;
    return e;
}

SymbolElement SymbolElement::weight(const Ctx& ctx) {
    WPoly w;
    w.add_term(0, 0, 1, Jet3::constant(ctx->order, 1.0));
    return scalar(ctx, w, 0, 1);
}

SymbolElement SymbolElement::xi(const Ctx& ctx, int axis) {
    assert(axis == 1 || axis == 2);
    WPoly p;
    p.add_term(axis == 1 ? 1 : 0, axis == 1 ? 0 : 1, 0, Jet3::constant(ctx->order, 1.0));
    return scalar(ctx, p, 0, 1);
}

SymbolElement SymbolElement::from_jet(const Ctx& ctx, const Jet3& f) {
    WPoly p;
    p.add_term(0, 0, 0, f);
    return scalar(ctx, p, 0, 0);
}

bool SymbolElement::is_zero() const {
    for (const auto& p : num_)
        if (p.max_abs() > 0.0) return false;
    return true;
}

SymbolElement SymbolElement::extract(int r, int c) const {
    SymbolElement e(ctx_, 1, 1, degree_);
    e.qpow_ = qpow_;
    e.num_[0] = entry(r, c);
    return e;
}

SymbolElement SymbolElement::embed(int rows, int cols, int r, int c) const {
    assert(rows_ == 1 && cols_ == 1);
    SymbolElement e = make(ctx_, rows, cols, degree_, qpow_);
    e.entry(r, c) = num_[0];
    return e;
}

SymbolElement SymbolElement::transpose() const {
    SymbolElement e(ctx_, cols_, rows_, degree_);
    e.qpow_ = qpow_;
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) e.entry(c, r) = entry(r, c);
    return e;
}

SymbolElement SymbolElement::operator-() const { return scaled(Cplx(-1.0)); }

SymbolElement operator+(const SymbolElement& a, const SymbolElement& b) {
    check_same_ctx(a.ctx(), b.ctx());
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeMismatch("symbol addition: shapes differ");
    if (a.degree() != b.degree()) throw ShapeMismatch("symbol addition: degrees differ");
    const int k = std::max(a.q_power(), b.q_power());
    SymbolElement out = SymbolElement::make(a.ctx(), a.rows(), a.cols(), a.degree(), k);
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) {
            WPoly pa = a.entry(r, c);
            for (int i = a.q_power(); i < k; ++i) pa = wpoly_mul_q(a.ctx(), pa);
            WPoly pb = b.entry(r, c);
            for (int i = b.q_power(); i < k; ++i) pb = wpoly_mul_q(b.ctx(), pb);
            out.entry(r, c) = pa + pb;
            out.entry(r, c).drop_exact_zeros();
        }
    }
    return out;
}

SymbolElement operator-(const SymbolElement& a, const SymbolElement& b) { return a + (-b); }

SymbolElement SymbolElement::scaled(Cplx s) const {
    SymbolElement out = *this;
    for (auto& p : out.num_) p = p.scaled(s);
    return out;
}

SymbolElement SymbolElement::scaled(const Jet3& s) const {
    SymbolElement out = *this;
    for (auto& p : out.num_) {
        p = p.scaled(s);
        p.drop_exact_zeros();
    }
    return out;
}

double SymbolElement::max_abs() const {
    double m = 0.0;
    for (const auto& p : num_) m = std::max(m, p.max_abs());
    return m;
}

void SymbolElement::canonicalize() {
    while (qpow_ > 0) {
        std::vector<WPoly> divided;
        divided.reserve(num_.size());
        bool ok = true;
        for (const auto& p : num_) {
            auto q = wpoly_divide_q(ctx_, p);
            if (!q) {
                ok = false;
                break;
            }
            divided.push_back(std::move(*q));
        }
        if (!ok) break;
        num_ = std::move(divided);
        --qpow_;
    }
    for (auto& p : num_) p.drop_exact_zeros();
}

bool SymbolElement::degree_consistent() const {
    for (const auto& p : num_)
        for (const auto& [k, v] : p.terms()) {
            if (v.max_abs() == 0.0) continue;
            if (k.d1 + k.d2 + k.e != degree_ + 2 * qpow_) return false;
        }
    return true;
}

SymbolElement sym_mul(const SymbolElement& a, const SymbolElement& b) {
    check_same_ctx(a.ctx_, b.ctx_);
    // 1x1 elements act as scalars on either side
    if (a.rows_ == 1 && a.cols_ == 1 && !(b.rows_ == 1 && b.cols_ == 1)) {
        SymbolElement out = SymbolElement::make(a.ctx_, b.rows_, b.cols_, a.degree_ + b.degree_, a.qpow_ + b.qpow_);
        for (int r = 0; r < b.rows_; ++r)
            for (int c = 0; c < b.cols_; ++c) {
                out.entry(r, c) = wpoly_mul(a.ctx_, a.entry(0, 0), b.entry(r, c));
                out.entry(r, c).drop_exact_zeros();
            }
        out.canonicalize();
        return out;
    }
    if (b.rows_ == 1 && b.cols_ == 1 && !(a.rows_ == 1 && a.cols_ == 1)) return sym_mul(b, a);
    if (a.cols_ != b.rows_) throw ShapeMismatch("sym_mul: inner dimensions differ");
    SymbolElement out(a.ctx_, a.rows_, b.cols_, a.degree_ + b.degree_);
    out.qpow_ = a.qpow_ + b.qpow_;
    for (int r = 0; r < a.rows_; ++r) {
        for (int c = 0; c < b.cols_; ++c) {
            WPoly acc;
            for (int m = 0; m < a.cols_; ++m) acc += wpoly_mul(a.ctx_, a.entry(r, m), b.entry(m, c));
            acc.drop_exact_zeros();
            out.entry(r, c) = std::move(acc);
        }
    }
    out.canonicalize();
    return out;
}

SymbolElement sym_dxi(const SymbolElement& a, int m) {
    assert(m == 1 || m == 2);
    const Ctx& ctx = a.ctx_;
    // S_m = sum_b g^{mb} xi_b;  dw/dxi_m = S_m w / Q;  dQ/dxi_m = 2 S_m.
    WPoly s;
    if (m == 1) {
        s.add_term(1, 0, 0, ctx->up11);
        s.add_term(0, 1, 0, ctx->up12);
    } else {
        s.add_term(1, 0, 0, ctx->up12);
        s.add_term(0, 1, 0, ctx->up22);
    }
    SymbolElement out(ctx, a.rows_, a.cols_, a.degree_ - 1);
    out.qpow_ = a.qpow_ + 1;
    for (int r = 0; r < a.rows_; ++r) {
        for (int c = 0; c < a.cols_; ++c) {
            const WPoly& p = a.entry(r, c);
            WPoly dp;       // plain xi-derivative, w treated as constant
            WPoly w_part;   // coefficient of w in p
            for (const auto& [k, v] : p.terms()) {
                const int dcount = (m == 1) ? k.d1 : k.d2;
                if (dcount > 0) {
                    dp.add_term(m == 1 ? k.d1 - 1 : k.d1, m == 2 ? k.d2 - 1 : k.d2, k.e, Cplx(double(dcount)) * v);
                }
                if (k.e == 1) w_part.add_term(k.d1, k.d2, 0, v);
            }
            WPoly res = wpoly_mul_q(ctx, dp);
            // + N1 * S_m * w
            WPoly sw = wpoly_mul(ctx, w_part, s);
            for (const auto& [k, v] : sw.terms()) res.add_term(k.d1, k.d2, 1, v);
            // - qpow * p * dQ  (dQ = 2 S_m)
            if (a.qpow_ > 0) res -= wpoly_mul(ctx, p, s).scaled(Cplx(2.0 * a.qpow_));
            res.drop_exact_zeros();
            out.entry(r, c) = std::move(res);
        }
    }
    out.canonicalize();
    return out;
}

SymbolElement sym_dx(const SymbolElement& a, int l) {
    assert(l >= 1 && l <= 3);
    const Ctx& ctx = a.ctx_;
    // dQ/dx_l as a polynomial; dw/dx_l = (dQ/dx_l) w / (2Q).
    WPoly dq;
    dq.add_term(2, 0, 0, jet_diff(ctx->up11, l));
    dq.add_term(1, 1, 0, Cplx(2.0) * jet_diff(ctx->up12, l));
    dq.add_term(0, 2, 0, jet_diff(ctx->up22, l));
    dq.drop_exact_zeros();
    SymbolElement out(ctx, a.rows_, a.cols_, a.degree_);
    out.qpow_ = a.qpow_ + 1;
    for (int r = 0; r < a.rows_; ++r) {
        for (int c = 0; c < a.cols_; ++c) {
            const WPoly& p = a.entry(r, c);
            WPoly dp;       // coefficient jets differentiated
            WPoly w_part;   // coefficient of w
            for (const auto& [k, v] : p.terms()) {
                if (v.order() == 0)
                    throw JetOrderExhausted("sym_dx: coefficient jet order exhausted");
                dp.add_term(k.d1, k.d2, k.e, jet_diff(v, l));
                if (k.e == 1) w_part.add_term(k.d1, k.d2, 0, v);
            }
            WPoly res = wpoly_mul_q(ctx, dp);
            WPoly sw = wpoly_mul(ctx, w_part, dq).scaled(Cplx(0.5));
            for (const auto& [k, v] : sw.terms()) res.add_term(k.d1, k.d2, 1, v);
            if (a.qpow_ > 0) res -= wpoly_mul(ctx, p, dq).scaled(Cplx(double(a.qpow_)));
            res.drop_exact_zeros();
            out.entry(r, c) = std::move(res);
        }
    }
    out.canonicalize();
    return out;
}

std::vector<Cplx> sym_eval(const SymbolElement& a, double xi1, double xi2) {
    const Ctx& ctx = a.ctx();
    const double q0 = (ctx->up11.value() * xi1 * xi1 + 2.0 * ctx->up12.value() * xi1 * xi2 + ctx->up22.value() * xi2 * xi2).real();
    if (!(q0 > 1e-300)) throw ZeroCovector("sym_eval: Q(xi') is not positive");
    const double w = std::sqrt(q0);
    std::vector<Cplx> out(static_cast<std::size_t>(a.rows()) * a.cols(), Cplx(0.0));
    const double qk = std::pow(q0, a.q_power());
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) {
            Cplx sum(0.0);
            for (const auto& [k, v] : a.entry(r, c).terms())
                sum += v.value() * Cplx(std::pow(xi1, k.d1) * std::pow(xi2, k.d2) * (k.e == 1 ? w : 1.0));
            out[static_cast<std::size_t>(r) * a.cols() + c] = sum / qk;
        }
    }
    return out;
}

std::vector<Jet3> sym_eval_jet(const SymbolElement& a, double xi1, double xi2) {
    const Ctx& ctx = a.ctx();
    Jet3 qjet = Cplx(xi1 * xi1) * ctx->up11 + Cplx(2.0 * xi1 * xi2) * ctx->up12 + Cplx(xi2 * xi2) * ctx->up22;
    if (!(qjet.value().real() > 1e-300)) throw ZeroCovector("sym_eval_jet: Q(xi') is not positive");
    const Jet3 wjet = jet_sqrt(qjet);
    const Jet3 qinv = jet_inv(qjet);
    Jet3 qinv_k = Jet3::constant(qjet.order(), 1.0);
    for (int i = 0; i < a.q_power(); ++i) qinv_k = qinv_k * qinv;
    std::vector<Jet3> out(static_cast<std::size_t>(a.rows()) * a.cols());
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) {
            Jet3 sum(ctx->order);
            for (const auto& [k, v] : a.entry(r, c).terms()) {
                Jet3 t = Cplx(std::pow(xi1, k.d1) * std::pow(xi2, k.d2)) * v;
                if (k.e == 1) t = t * wjet;
                sum += t;
            }
            out[static_cast<std::size_t>(r) * a.cols() + c] = sum * qinv_k;
        }
    }
    return out;
}

SymbolTable SymbolTable::extract(int r, int c) const {
    SymbolTable out;
    out.name = name;
    out.rows = 1;
    out.cols = 1;
    out.top = top;
    out.complete_below = complete_below;
    out.slots.reserve(slots.size());
    for (const auto& s : slots) out.slots.push_back(s.extract(r, c));
    return out;
}

namespace {

SymbolElement zero_element(const Ctx& ctx, int rows, int cols, int degree) { return SymbolElement(ctx, rows, cols, degree); }

}  // namespace

SymbolTable sym_compose(const SymbolTable& a, const SymbolTable& b, int out_lowest, const std::string& name) {
    if (a.slots.empty() || b.slots.empty()) throw InsufficientDepth("sym_compose: empty operand table");
    if (a.cols != b.rows) throw ShapeMismatch("sym_compose: inner dimensions differ");
    const Ctx& ctx = a.slots.front().ctx();
    check_same_ctx(ctx, b.slots.front().ctx());
    const int out_top = a.top + b.top;
    int exact_lowest = out_top;
    {
        const int lim_a = a.complete_below ? out_lowest : a.lowest() + b.top;
        const int lim_b = b.complete_below ? out_lowest : a.top + b.lowest();
        exact_lowest = std::max(lim_a, lim_b);
    }
    if (out_lowest > out_top) throw InsufficientDepth("sym_compose: requested top above product top");
    if (out_lowest < exact_lowest) throw InsufficientDepth("sym_compose: operand tables too shallow for requested depth");

    // Cached xi-derivatives of A slots and x-derivatives of B slots.
    std::map<std::tuple<int, int, int>, SymbolElement> da, db;
    std::function<const SymbolElement&(int, int, int)> get_da = [&](int deg, int t1, int t2) -> const SymbolElement& {
        auto key = std::make_tuple(deg, t1, t2);
        auto it = da.find(key);
        if (it != da.end()) return it->second;
        if (t1 == 0 && t2 == 0) return da.emplace(key, a.at(deg)).first->second;
        if (t2 > 0) {
            const SymbolElement& prev = get_da(deg, t1, t2 - 1);
            return da.emplace(key, sym_dxi(prev, 2)).first->second;
        }
        const SymbolElement& prev = get_da(deg, t1 - 1, 0);
        return da.emplace(key, sym_dxi(prev, 1)).first->second;
    };
    std::function<const SymbolElement&(int, int, int)> get_db = [&](int deg, int t1, int t2) -> const SymbolElement& {
        auto key = std::make_tuple(deg, t1, t2);
        auto it = db.find(key);
        if (it != db.end()) return it->second;
        if (t1 == 0 && t2 == 0) return db.emplace(key, b.at(deg)).first->second;
        if (t2 > 0) {
            const SymbolElement& prev = get_db(deg, t1, t2 - 1);
            return db.emplace(key, sym_dx(prev, 2)).first->second;
        }
        const SymbolElement& prev = get_db(deg, t1 - 1, 0);
        return db.emplace(key, sym_dx(prev, 1)).first->second;
    };

    SymbolTable out;
    out.name = name;
    out.rows = a.rows;
    out.cols = b.cols;
    out.top = out_top;
    out.complete_below = false;
    for (int d = out_top; d >= out_lowest; --d) {
        SymbolElement acc = zero_element(ctx, a.rows, b.cols, d);
        for (int i = a.lowest(); i <= a.top; ++i) {
            for (int j = b.lowest(); j <= b.top; ++j) {
                const int t = i + j - d;
                if (t < 0) continue;
                for (int t1 = 0; t1 <= t; ++t1) {
                    const int t2 = t - t1;
                    const SymbolElement& ai = get_da(i, t1, t2);
                    if (ai.is_zero()) continue;
                    const SymbolElement& bj = get_db(j, t1, t2);
                    if (bj.is_zero()) continue;
                    const Cplx coeff = minus_i_pow(t) / Cplx(factorial(t1) * factorial(t2));
                    acc = acc + sym_mul(ai, bj).scaled(coeff);
                }
            }
        }
        acc.canonicalize();
        out.slots.push_back(std::move(acc));
    }
    return out;
}

SymbolTable sym_left_mul(const std::vector<Jet3>& f, int frows, int fcols, const SymbolTable& b, const std::string& name) {
    if (fcols != b.rows) throw ShapeMismatch("sym_left_mul: inner dimensions differ");
    SymbolTable out;
    out.name = name;
    out.rows = frows;
    out.cols = b.cols;
    out.top = b.top;
    out.complete_below = b.complete_below;
    for (const auto& slot : b.slots) {
        SymbolElement e = SymbolElement::make(slot.ctx(), frows, b.cols, slot.degree(), slot.q_power());
        for (int r = 0; r < frows; ++r) {
            for (int c = 0; c < b.cols; ++c) {
                WPoly acc;
                for (int m = 0; m < fcols; ++m) acc += slot.entry(m, c).scaled(f[static_cast<std::size_t>(r) * fcols + m]);
                acc.drop_exact_zeros();
                e.entry(r, c) = std::move(acc);
            }
        }
        e.canonicalize();
        out.slots.push_back(std::move(e));
    }
    return out;
}

SymbolTable sym_right_mul_op(const SymbolTable& a, const std::vector<Jet3>& f, int frows, int fcols, int out_lowest,
                             const std::string& name) {
    if (a.slots.empty()) throw InsufficientDepth("sym_right_mul_op: empty table");
    const Ctx& ctx = a.slots.front().ctx();
    SymbolTable mult;
    mult.rows = frows;
    mult.cols = fcols;
    mult.top = 0;
    mult.complete_below = true;
    SymbolElement e = SymbolElement::make(ctx, frows, fcols, 0, 0);
    for (int r = 0; r < frows; ++r)
        for (int c = 0; c < fcols; ++c) {
            WPoly p;
            p.add_term(0, 0, 0, f[static_cast<std::size_t>(r) * fcols + c]);
            p.drop_exact_zeros();
            e.entry(r, c) = std::move(p);
        }
    mult.slots.push_back(std::move(e));
    return sym_compose(a, mult, out_lowest, name);
}

SymbolTable table_add(const SymbolTable& a, const SymbolTable& b, const std::string& name) {
    if (a.rows != b.rows || a.cols != b.cols) throw ShapeMismatch("table_add: shapes differ");
    const Ctx& ctx = a.slots.front().ctx();
    SymbolTable out;
    out.name = name;
    out.rows = a.rows;
    out.cols = a.cols;
    out.top = std::max(a.top, b.top);
    int lowest;
    if (a.complete_below && b.complete_below)
        lowest = std::min(a.lowest(), b.lowest());
    else if (a.complete_below)
        lowest = b.lowest();
    else if (b.complete_below)
        lowest = a.lowest();
    else
        lowest = std::max(a.lowest(), b.lowest());
    out.complete_below = a.complete_below && b.complete_below;
    for (int d = out.top; d >= lowest; --d) {
        SymbolElement acc = zero_element(ctx, a.rows, a.cols, d);
        if (a.has(d)) acc = acc + a.at(d);
        if (b.has(d)) acc = acc + b.at(d);
        acc.canonicalize();
        out.slots.push_back(std::move(acc));
    }
    return out;
}

SymbolTable table_neg(const SymbolTable& a) {
    SymbolTable out = a;
    for (auto& s : out.slots) s = -s;
    return out;
}

SymbolTable table_restrict_boundary(const SymbolTable& a) {
    if (a.slots.empty()) return a;
    // The denominators live in the context (w^2 = Q), so a faithful
    // restriction needs a boundary context as well as restricted numerators.
    const Ctx& old = a.slots.front().ctx();
    auto nq = std::make_shared<QContext>();
    nq->order = old->order;
    nq->up11 = old->up11.restrict_boundary();
    nq->up12 = old->up12.restrict_boundary();
    nq->up22 = old->up22.restrict_boundary();
    nq->up11_inv = jet_inv(nq->up11);
    const Ctx ctx_b = nq;

    SymbolTable out;
    out.name = a.name;
    out.rows = a.rows;
    out.cols = a.cols;
    out.top = a.top;
    out.complete_below = a.complete_below;
    out.slots.reserve(a.slots.size());
    for (const auto& slot : a.slots) {
        SymbolElement e = SymbolElement::make(ctx_b, slot.rows(), slot.cols(), slot.degree(), slot.q_power());
        for (int r = 0; r < slot.rows(); ++r) {
            for (int c = 0; c < slot.cols(); ++c) {
                WPoly p;
                for (const auto& [k, v] : slot.entry(r, c).terms()) p.add_term(k.d1, k.d2, k.e, v.restrict_boundary());
                p.drop_exact_zeros();
                e.entry(r, c) = std::move(p);
            }
        }
        out.slots.push_back(std::move(e));
    }
    return out;
}

}  // namespace emdtn
