#include "kernels/kernels.hpp"

#if defined(EMDTN_HAVE_AVX2_BUILD)

#include <immintrin.h>

namespace emdtn::kernels {

namespace {

// Two interleaved complexes per 256-bit lane. With x = (xr0, xi0, xr1, xi1):
//   t = ai * swap(x)          = (ai*xi0, ai*xr0, ...)
//   fmaddsub(ar, x, t)        = (ar*xr0 - ai*xi0, ar*xi0 + ai*xr0, ...)
// which is exactly a*x.

inline __m256d cmul_vec(__m256d x, __m256d ar, __m256d ai) {
    __m256d xswap = _mm256_permute_pd(x, 0b0101);
    return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, xswap));
}

void caxpy_avx2(Cplx* dst, Cplx a, const Cplx* x, std::size_t n) {
    double* d = reinterpret_cast<double*>(dst);
    const double* s = reinterpret_cast<const double*>(x);
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(s + 2 * i);
        __m256d dv = _mm256_loadu_pd(d + 2 * i);
        _mm256_storeu_pd(d + 2 * i, _mm256_add_pd(dv, cmul_vec(xv, ar, ai)));
    }
    for (; i < n; ++i) dst[i] += a * x[i];
}

void cmul_avx2(Cplx* dst, const Cplx* a, const Cplx* b, std::size_t n) {
    double* d = reinterpret_cast<double*>(dst);
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d av = _mm256_loadu_pd(pa + 2 * i);
        __m256d bv = _mm256_loadu_pd(pb + 2 * i);
        __m256d ar = _mm256_shuffle_pd(av, av, 0b0000);
        __m256d ai = _mm256_shuffle_pd(av, av, 0b1111);
        __m256d bswap = _mm256_permute_pd(bv, 0b0101);
        _mm256_storeu_pd(d + 2 * i, _mm256_fmaddsub_pd(ar, bv, _mm256_mul_pd(ai, bswap)));
    }
    for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void cscale_avx2(Cplx* dst, Cplx a, std::size_t n) {
    double* d = reinterpret_cast<double*>(dst);
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d dv = _mm256_loadu_pd(d + 2 * i);
        _mm256_storeu_pd(d + 2 * i, cmul_vec(dv, ar, ai));
    }
    for (; i < n; ++i) dst[i] *= a;
}

}  // namespace

const Impl* avx2_impl_if_supported() {
    static const Impl impl{"avx2", caxpy_avx2, cmul_avx2, cscale_avx2};
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &impl;
    return nullptr;
}

}  // namespace emdtn::kernels

#endif
