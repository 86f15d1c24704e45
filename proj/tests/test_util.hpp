#pragma once

#include <random>

#include "jets.hpp"

namespace emdtn::testutil {

inline double uniform_pm(std::mt19937_64& rng, double half_width) {
    const double u = double(rng() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * half_width;
}

inline Jet3 random_jet(std::mt19937_64& rng, int order, bool complex_coeffs = true, Cplx center = Cplx(0.0)) {
    Jet3 j(order);
    for (int k3 = 0; k3 <= order; ++k3)
        for (int k2 = 0; k2 + k3 <= order; ++k2)
            for (int k1 = 0; k1 + k2 + k3 <= order; ++k1) {
                const int total = k1 + k2 + k3;
                double fact = 1.0;
                for (int i = 2; i <= total + 1; ++i) fact *= i;
                const double re = uniform_pm(rng, 0.5) / fact;
                const double im = complex_coeffs ? uniform_pm(rng, 0.5) / fact : 0.0;
                j.set(k1, k2, k3, Cplx(re, im));
            }
    j.set(0, 0, 0, center + j.at(0, 0, 0));
    return j;
}

}  // namespace emdtn::testutil
