#pragma once

// Minimal iterative radix-2 FFT for the doubly periodic boundary grids.
// Grid sides are powers of two (up to 256 in the CLI paths).

#include <complex>
#include <vector>

namespace emdtn {

using Cplx = std::complex<double>;

// In-place 1D transform, n a power of two. inverse=true applies the 1/n
// normalization.
void fft(Cplx* data, std::size_t n, bool inverse);

// In-place 2D transform of a row-major n2 x n1 grid (index = i2*n1 + i1).
void fft2(std::vector<Cplx>& grid, std::size_t n1, std::size_t n2, bool inverse);

}  // namespace emdtn
