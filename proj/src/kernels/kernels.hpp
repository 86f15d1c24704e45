#pragma once

// Data-parallel inner loops on contiguous complex<double> arrays.
// Scalar reference implementations always exist; AVX2 (x86) and NEON
// (aarch64) variants are selected once at startup based on what the CPU
// actually supports. EMDTN_KERNEL=scalar|avx2|neon forces a variant.

#include <complex>
#include <cstddef>
#include <functional>

namespace emdtn::kernels {

using Cplx = std::complex<double>;

struct Impl {
    const char* name;
    // dst[i] += a * x[i]
    void (*caxpy)(Cplx* dst, Cplx a, const Cplx* x, std::size_t n);
    // dst[i] = a[i] * b[i]
    void (*cmul)(Cplx* dst, const Cplx* a, const Cplx* b, std::size_t n);
    // dst[i] *= a
    void (*cscale)(Cplx* dst, Cplx a, std::size_t n);
};

const Impl& scalar_impl();
// The selected implementation (resolved on first use, stable afterwards).
const Impl& active();
// Force a variant by name; returns false if unavailable on this machine.
bool select(const char* name);

inline void caxpy(Cplx* dst, Cplx a, const Cplx* x, std::size_t n) { active().caxpy(dst, a, x, n); }
inline void cmul(Cplx* dst, const Cplx* a, const Cplx* b, std::size_t n) { active().cmul(dst, a, b, n); }
inline void cscale(Cplx* dst, Cplx a, std::size_t n) { active().cscale(dst, a, n); }

#if defined(EMDTN_HAVE_AVX2_BUILD)
const Impl* avx2_impl_if_supported();
#endif
#if defined(EMDTN_HAVE_NEON_BUILD)
const Impl* neon_impl();
#endif

// Simple blocked parallel-for used by the data-parallel paths. jobs <= 1
// runs inline. Results must not depend on the partition.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace emdtn::kernels
