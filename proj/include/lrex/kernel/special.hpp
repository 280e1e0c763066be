#pragma once

#include <vector>

namespace lrex::special {

/// Riemann zeta at real x != 1. Negative even integers return exactly 0.
double zeta(double x);

/// sum_{k>=n} k^{-s} for s > 1, n >= 1.
double zeta_tail(double s, long n);

/// sum_{k>=1} (1 - cos k phi) / k^s for s > 1, phi in [0, pi]; no cancellation as phi -> 0.
double cos_deficit_sum(double s, double phi);

/// sum_{k>=1} sin(k phi) / k^s for s > 1, phi in [0, pi].
double sine_sum(double s, double phi);

/// Upper incomplete gamma Gamma(a, x) for real a and x > 0.
double upper_gamma(double a, double x);

/// Exponential integral E1(x), x > 0.
double expint_e1(double x);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int n);

/// Harmonic number H_n.
double harmonic(int n);

}  // namespace lrex::special
