#pragma once

#include <cmath>

namespace lrex::simd::scalar {

// Branch point between the Taylor series and the closed forms below.
inline constexpr double kSeriesCut = 0.25;

/// g(x) = (x - 1 + e^{-x}) / x^2 for x >= 0.
inline double g_fn(double x) {
    if (x < kSeriesCut) {
        // sum_k (-x)^k / (k+2)!
        double term = 0.5, s = 0.0;
        for (int k = 0; k < 16; ++k) {
            s += term;
            term *= -x / (k + 3);
        }
        return s;
    }
    return (x - 1.0 + std::exp(-x)) / (x * x);
}

/// h(x) = (1 - e^{-x}) / x for x >= 0.
inline double h_fn(double x) {
    if (x < kSeriesCut) {
        double term = 1.0, s = 0.0;
        for (int k = 0; k < 16; ++k) {
            s += term;
            term *= -x / (k + 2);
        }
        return s;
    }
    return -std::expm1(-x) / x;
}

}  // namespace lrex::simd::scalar
