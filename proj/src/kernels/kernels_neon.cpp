#include "kernels/kernels.hpp"

#if defined(EMDTN_HAVE_NEON_BUILD)

#include <arm_neon.h>

namespace emdtn::kernels {

namespace {

// One complex per 128-bit lane: v = (re, im).

inline float64x2_t cmul_vec(float64x2_t x, float64x2_t ar, float64x2_t ai_neg_pos) {
    // a*x = (ar*xr - ai*xi, ar*xi + ai*xr)
    float64x2_t xswap = vextq_f64(x, x, 1);
    return vfmaq_f64(vmulq_f64(ai_neg_pos, xswap), ar, x);
}

inline float64x2_t make_ai(Cplx a) {
    const double v[2] = {-a.imag(), a.imag()};
    return vld1q_f64(v);
}

void caxpy_neon(Cplx* dst, Cplx a, const Cplx* x, std::size_t n) {
    double* d = reinterpret_cast<double*>(dst);
    const double* s = reinterpret_cast<const double*>(x);
    const float64x2_t ar = vdupq_n_f64(a.real());
    const float64x2_t ai = make_ai(a);
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t xv = vld1q_f64(s + 2 * i);
        float64x2_t dv = vld1q_f64(d + 2 * i);
        vst1q_f64(d + 2 * i, vaddq_f64(dv, cmul_vec(xv, ar, ai)));
    }
}

void cmul_neon(Cplx* dst, const Cplx* a, const Cplx* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t ar = vdupq_n_f64(a[i].real());
        const float64x2_t ai = make_ai(a[i]);
        float64x2_t bv = vld1q_f64(reinterpret_cast<const double*>(b + i));
        vst1q_f64(reinterpret_cast<double*>(dst + i), cmul_vec(bv, ar, ai));
    }
}

void cscale_neon(Cplx* dst, Cplx a, std::size_t n) {
    const float64x2_t ar = vdupq_n_f64(a.real());
    const float64x2_t ai = make_ai(a);
    double* d = reinterpret_cast<double*>(dst);
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t dv = vld1q_f64(d + 2 * i);
        vst1q_f64(d + 2 * i, cmul_vec(dv, ar, ai));
    }
}

}  // namespace

const Impl* neon_impl() {
    static const Impl impl{"neon", caxpy_neon, cmul_neon, cscale_neon};
    return &impl;
}

}  // namespace emdtn::kernels

#endif
