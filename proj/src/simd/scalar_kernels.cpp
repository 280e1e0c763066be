#include "lrex/simd/kernels.hpp"
#include "scalar_math.hpp"

#include <cmath>
#include <numbers>

namespace lrex::simd {
namespace {

double sin2_series(const double* coef, std::size_t n, double step, double phase) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double y = std::fma(step, static_cast<double>(k), phase);
        double v = std::sin(std::numbers::pi * (y - std::nearbyint(y)));
        s += coef[k] * v * v;
    }
    return s;
}

double sin_series(const double* coef, std::size_t n, double step, double phase) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double y = std::fma(step, static_cast<double>(k), phase);
        s += coef[k] * std::sin(2.0 * std::numbers::pi * (y - std::nearbyint(y)));
    }
    return s;
}

double variance_reduce(const double* theta, const double* w, std::size_t n, double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * scalar::g_fn(theta[i] * t);
    return s * t * t;
}

double resolvent_reduce(const double* theta, const double* w, std::size_t n, double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] / (lambda + theta[i]);
    return s;
}

double ratio_reduce(const double* num, const double* den, const double* w, std::size_t n,
                    double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * num[i] / (lambda + den[i]);
    return s;
}

double green_reduce(const double* theta, const double* w, std::size_t n, double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * scalar::h_fn(theta[i] * t);
    return s * t;
}

double green_sq_reduce(const double* theta, const double* w, std::size_t n, double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double h = scalar::h_fn(theta[i] * t);
        s += w[i] * h * h;
    }
    return s * t * t;
}

const KernelTable kTable{Isa::Scalar,     sin2_series,  sin_series,      variance_reduce,
                         resolvent_reduce, ratio_reduce, green_reduce,    green_sq_reduce};

}  // namespace

namespace detail {
const KernelTable& scalar_table() { return kTable; }
}  // namespace detail

}  // namespace lrex::simd
