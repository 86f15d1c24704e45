#include "fft.hpp"

#include <cassert>
#include <cmath>

#include "errors.hpp"

namespace emdtn {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void fft(Cplx* data, std::size_t n, bool inverse) {
    if (!is_pow2(n)) throw Error("fft: size must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? kTwoPi : -kTwoPi) / double(len);
        const Cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Cplx w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Cplx u = data[i + k];
                const Cplx v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const Cplx s(1.0 / double(n));
        for (std::size_t i = 0; i < n; ++i) data[i] *= s;
    }
}

void fft2(std::vector<Cplx>& grid, std::size_t n1, std::size_t n2, bool inverse) {
    assert(grid.size() == n1 * n2);
    for (std::size_t r = 0; r < n2; ++r) fft(grid.data() + r * n1, n1, inverse);
    std::vector<Cplx> col(n2);
    for (std::size_t c = 0; c < n1; ++c) {
        for (std::size_t r = 0; r < n2; ++r) col[r] = grid[r * n1 + c];
        fft(col.data(), n2, inverse);
        for (std::size_t r = 0; r < n2; ++r) grid[r * n1 + c] = col[r];
    }
}

}  // namespace emdtn
