#include "kernels/kernels.hpp"

namespace emdtn::kernels {

namespace {

void caxpy_scalar(Cplx* dst, Cplx a, const Cplx* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += a * x[i];
}

void cmul_scalar(Cplx* dst, const Cplx* a, const Cplx* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void cscale_scalar(Cplx* dst, Cplx a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] *= a;
}

}  // namespace

const Impl& scalar_impl() {
    static const Impl impl{"scalar", caxpy_scalar, cmul_scalar, cscale_scalar};
    return impl;
}

}  // namespace emdtn::kernels
