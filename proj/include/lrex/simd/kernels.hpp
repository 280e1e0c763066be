#pragma once

// Batched reductions used by the Fourier-symbol sums and the spectral
// quadratures. Every entry has a scalar reference and, where the CPU allows,
// an AVX2 variant; the two agree to rounding (reduction order differs).

#include <cstddef>

namespace lrex::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    Isa isa;
    // sum_k coef[k] * sin^2(pi * (phase + step*k))
    double (*sin2_series)(const double* coef, std::size_t n, double step, double phase);
    // sum_k coef[k] * sin(2*pi * (phase + step*k))
    double (*sin_series)(const double* coef, std::size_t n, double step, double phase);
    // sum_i w[i] * t^2 g(theta[i] t),  g(x) = (x - 1 + e^{-x}) / x^2,  g(0) = 1/2
    double (*variance_reduce)(const double* theta, const double* w, std::size_t n, double t);
    // sum_i w[i] / (lambda + theta[i])
    double (*resolvent_reduce)(const double* theta, const double* w, std::size_t n, double lambda);
    // sum_i w[i] * num[i] / (lambda + den[i])
    double (*ratio_reduce)(const double* num, const double* den, const double* w, std::size_t n,
                           double lambda);
    // sum_i w[i] * t h(theta[i] t),  h(x) = (1 - e^{-x}) / x,  h(0) = 1
    double (*green_reduce)(const double* theta, const double* w, std::size_t n, double t);
    // sum_i w[i] * (t h(theta[i] t))^2
    double (*green_sq_reduce)(const double* theta, const double* w, std::size_t n, double t);
};

/// Table selected once per process: AVX2 when supported, unless the
/// environment variable LREX_SIMD=scalar forces the reference path.
const KernelTable& kernels();

/// Specific table; throws std::runtime_error when the ISA is unavailable.
const KernelTable& kernels(Isa isa);

bool available(Isa isa);
const char* name(Isa isa);

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
}  // namespace detail

}  // namespace lrex::simd
