#include "lrex/kernel/fourier.hpp"

#include "lrex/error.hpp"
#include "lrex/kernel/compensated.hpp"
#include "lrex/kernel/special.hpp"
#include "lrex/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace lrex {
namespace {

constexpr double kPi = std::numbers::pi;

// Distance to the nearest integer.
double fold_half(double x) { return std::abs(x - std::nearbyint(x)); }

void check_params(const FourierSymbolParams& p) {
    if (p.dim != 1 && p.dim != 2) throw Error(ErrorCode::BadSize, "dim must be 1 or 2");
    if (!(p.alpha > 0.0)) throw Error(ErrorCode::BadAlpha, "alpha must be positive");
    if (!(p.tail_tol > 0.0 && p.tail_tol <= 1e-6)) throw Error(ErrorCode::TailNotConverged, "tail_tol must lie in (0, 1e-6]");
    if (p.z_max != 0 && p.z_max < 64) throw Error(ErrorCode::TruncationTooSmall, "z_max must be >= 64");
    if (p.r_kind == RKind::S && p.dim == 2 && !(p.b_bar[0] > 0.0 && p.b_bar[1] > 0.0))
        throw Error(ErrorCode::NonIrreducible, "axis weights must be positive");
}

// Weight of r at z in units of its normalizer: |z|^{-(d+alpha)} times the direction factor.
double r_shape(const FourierSymbolParams& p, long z1, long z2) {
    double r2 = static_cast<double>(z1) * z1 + static_cast<double>(z2) * z2;
    double w = std::pow(r2, -0.5 * (p.dim + p.alpha));
    if (p.dim == 2 && p.r_kind == RKind::S) w *= (z1 != 0 ? p.b_bar[0] : 0.0) + (z2 != 0 ? p.b_bar[1] : 0.0);
    return w;
}

// Upper bound of the direction factor.
double r_shape_max_factor(const FourierSymbolParams& p) {
    return (p.dim == 2 && p.r_kind == RKind::S) ? p.b_bar[0] + p.b_bar[1] : 1.0;
}

ThetaValue theta_series_1d(const FourierSymbolParams& p, double u, long z) {
    const double s = 1.0 + p.alpha;
    const double c0 = 1.0 / (2.0 * special::zeta(s));
    std::vector<double> coef(static_cast<std::size_t>(z));
    for (long k = 1; k <= z; ++k) coef[k - 1] = 4.0 * c0 * std::pow(static_cast<double>(k), -s);
    const auto& kt = simd::kernels();
    // Sum from the small terms up to limit rounding growth.
    double partial = kt.sin2_series(coef.data(), coef.size(), u, u);
    double mass_tail = 2.0 * c0 * special::zeta_tail(s, z + 1);
    double sn = std::abs(std::sin(kPi * u));
    ThetaValue out;
    out.value = partial + mass_tail;
    out.bracket = 2.0 * c0 * std::pow(static_cast<double>(z + 1), -s) / sn;
    out.z_used = z;
    return out;
}

ThetaValue theta_series_2d(const FourierSymbolParams& p, const Point& u, long z) {
    const double c = r_norm(p);
    const double expo = 2.0 + p.alpha;
    const auto& kt = simd::kernels();
    std::vector<double> coef(static_cast<std::size_t>(2 * z + 1));
    CompensatedSum partial, box_mass;
    for (long z2 = -z; z2 <= z; ++z2) {
        for (long z1 = -z; z1 <= z; ++z1) {
            double w = (z1 == 0 && z2 == 0) ? 0.0 : c * r_shape(p, z1, z2);
            coef[static_cast<std::size_t>(z1 + z)] = 2.0 * w;
            box_mass.add(w);
        }
        partial.add(kt.sin2_series(coef.data(), coef.size(), u[0], -static_cast<double>(z) * u[0] + u[1] * z2));
    }
    // Abel bound along the axis where sin(pi u_i) is largest.
    int ax = std::abs(std::sin(kPi * u[0])) >= std::abs(std::sin(kPi * u[1])) ? 0 : 1;
    double sn = std::abs(std::sin(kPi * u[ax]));
    double inner = 0.0;
    for (long zo = -z; zo <= z; ++zo) {
        long z1 = ax == 0 ? z + 1 : zo, z2 = ax == 0 ? zo : z + 1;
        inner += 2.0 * c * r_shape(p, z1, z2);
    }
    double outer = 6.0 * c * r_shape_max_factor(p) * special::zeta_tail(expo, z + 1);
    ThetaValue out;
    out.value = partial.value() + (1.0 - box_mass.value());
    out.bracket = (inner + outer) / sn;
    out.z_used = z;
    return out;
}

}  // namespace

const char* to_string(FKind k) {
    switch (k) {
        case FKind::PowAlpha: return "pow_alpha";
        case FKind::Pow2Log: return "pow2_log";
        case FKind::Pow2: return "pow2";
    }
    return "?";
}

double r_norm(const FourierSymbolParams& p) {
    if (p.dim == 1) return 1.0 / (2.0 * special::zeta(1.0 + p.alpha));
    const double nu = 1.0 + 0.5 * p.alpha;
    const double s0 = ewald(nu).s0();
    if (p.r_kind == RKind::S0) return 1.0 / s0;
    // Axis points carry a single weight.
    double bb = p.b_bar[0] + p.b_bar[1];
    return 1.0 / (bb * s0 - bb * 2.0 * special::zeta(2.0 + p.alpha));
}

ThetaValue theta(const FourierSymbolParams& params, const Point& u) {
    check_params(params);
    Point w{fold_half(u[0]), params.dim == 2 ? fold_half(u[1]) : 0.0};
    if (w[0] == 0.0 && w[1] == 0.0) return {0.0, 0.0, 0};
    long z = params.z_max ? params.z_max : (params.dim == 1 ? 4096 : 64);
    const long cap = params.dim == 1 ? params.z_cap : static_cast<long>(std::sqrt(static_cast<double>(params.z_cap)));
    for (;;) {
        ThetaValue v = params.dim == 1 ? theta_series_1d(params, w[0], z) : theta_series_2d(params, w, z);
        if (v.bracket <= params.tail_tol) return v;
        if (!params.adaptive || z >= cap)
            throw Error(ErrorCode::TailNotConverged,
                        "tail bracket " + std::to_string(v.bracket) + " at z_max=" + std::to_string(z));
        z = std::min(cap, z * 4);
    }
}

double theta_fast(const FourierSymbolParams& params, const Point& u) {
    const double a0 = fold_half(u[0]);
    if (params.dim == 1) {
        const double s = 1.0 + params.alpha;
        return special::cos_deficit_sum(s, 2.0 * kPi * a0) / special::zeta(s);
    }
    const double a1 = fold_half(u[1]);
    const double nu = 1.0 + 0.5 * params.alpha;
    const Ewald2D& ew = ewald(nu);
    if (params.r_kind == RKind::S0) return ew.deficit({a0, a1}) / ew.s0();
    const double s = 2.0 + params.alpha;
    const double bb = params.b_bar[0] + params.b_bar[1];
    double num = bb * ew.deficit({a0, a1}) - params.b_bar[0] * 2.0 * special::cos_deficit_sum(s, 2.0 * kPi * a1) -
                 params.b_bar[1] * 2.0 * special::cos_deficit_sum(s, 2.0 * kPi * a0);
    return num * r_norm(params);
}

double theta_table(const JumpKernel& k, const Point& u) {
    CompensatedSum acc;
    for (const Disp& y : k.displacements()) {
        double sn = std::sin(kPi * (u[0] * y[0] + u[1] * y[1]));
        acc.add(2.0 * k.s(y) * sn * sn);
    }
    return acc.value();
}

double f_alpha(double alpha, double x) {
    x = std::abs(x);
    if (alpha < 2.0) return std::pow(x, alpha);
    if (alpha == 2.0) return x * x * std::abs(std::log(x));
    return x * x;
}

namespace {

constexpr int kDyadicLevels = 64;

// Both radial integrands behave like pi^2 q^{1-alpha} near 0; integral over [0, 2^{-64}].
double small_q_remainder(double alpha) {
    const double eps = std::ldexp(1.0, -kDyadicLevels);
    return kPi * kPi * std::pow(eps, 2.0 - alpha) / (2.0 - alpha);
}

// 1 - J0(x) without cancellation at small x.
double one_minus_j0(double x) {
    if (x >= 2.0) return 1.0 - std::cyl_bessel_j(0.0, x);
    const double q = 0.25 * x * x;
    double term = -1.0, acc = 0.0;
    for (int k = 1; k < 40; ++k) {
        term *= -q / (static_cast<double>(k) * k);
        acc += term;
        if (std::abs(term) < 1e-18 * acc) break;
    }
    return acc;
}

// int_0^inf sin^2(pi q) q^{-1-alpha} dq for 0 < alpha < 2.
double sin2_power_integral(double alpha) {
    const auto& gl = special::gauss_legendre(20);
    auto f = [alpha](double q) {
        double s = std::sin(kPi * q);
        return s * s * std::pow(q, -1.0 - alpha);
    };
    auto panel = [&](double a, double b) {
        double m = 0.5 * (a + b), h = 0.5 * (b - a), acc = 0.0;
        for (std::size_t i = 0; i < gl.x.size(); ++i) acc += gl.w[i] * f(m + h * gl.x[i]);
        return acc * h;
    };
    CompensatedSum total;
    total.add(small_q_remainder(alpha));
    for (int k = 0; k < kDyadicLevels; ++k) total.add(panel(std::ldexp(1.0, -k - 1), std::ldexp(1.0, -k)));
    constexpr int Q = 4000;
    for (int q = 1; q < Q; ++q) {
        total.add(panel(q, q + 0.5));
        total.add(panel(q + 0.5, q + 1.0));
    }
    // Tail: half the power mass minus the cosine part, by repeated integration by parts.
    const double beta = 1.0 + alpha, tp2 = 4.0 * kPi * kPi;
    double cos_tail = beta / tp2 * std::pow(Q, -beta - 1.0) -
                      beta * (beta + 1.0) / tp2 * ((beta + 2.0) / tp2 * std::pow(Q, -beta - 3.0));
    total.add(std::pow(Q, -alpha) / (2.0 * alpha) - 0.5 * cos_tail);
    return total.value();
}

// int_{R^2} sin^2(pi q_1) |q|^{-2-alpha} dq = pi int_0^inf r^{-1-alpha} (1 - J0(2 pi r)) dr.
double sin2_power_integral_2d(double alpha) {
    const auto& gl = special::gauss_legendre(20);
    auto f = [alpha](double r) { return std::pow(r, -1.0 - alpha) * one_minus_j0(2.0 * kPi * r); };
    auto panel = [&](double a, double b) {
        double m = 0.5 * (a + b), h = 0.5 * (b - a), acc = 0.0;
        for (std::size_t i = 0; i < gl.x.size(); ++i) acc += gl.w[i] * f(m + h * gl.x[i]);
        return acc * h;
    };
    CompensatedSum total;
    total.add(small_q_remainder(alpha));
    for (int k = 0; k < kDyadicLevels; ++k) total.add(panel(std::ldexp(1.0, -k - 1), std::ldexp(1.0, -k)));
    constexpr int Q = 4000;
    for (int q = 1; q < Q; ++q) {
        total.add(panel(q, q + 0.5));
        total.add(panel(q + 0.5, q + 1.0));
    }
    // J0 tail oscillates with amplitude O(Q^{-1/2}); its integral is O(Q^{-3/2-alpha}).
    total.add(std::pow(Q, -alpha) / alpha);
    return kPi * total.value();
}

}  // namespace

Asymptote theta_asymptote(const FourierSymbolParams& params) {
    if (!(params.alpha > 0.0)) throw Error(ErrorCode::BadAlpha, "alpha must be positive");
    const double a = params.alpha;
    const double c = r_norm(params);
    // Tail prefactor kappa: r(z) ~ kappa |z|^{-d-alpha} off the axes.
    const double kappa = c * r_shape_max_factor(params);
    if (a < 2.0) {
        double integral = params.dim == 1 ? 2.0 * sin2_power_integral(a) : sin2_power_integral_2d(a);
        return {2.0 * kappa * integral, FKind::PowAlpha};
    }
    if (a == 2.0) {
        double sphere = params.dim == 1 ? 2.0 : 2.0 * kPi;
        return {2.0 * kappa * kPi * kPi * sphere / params.dim, FKind::Pow2Log};
    }
    // Second moment along e_1: J = 2 pi^2 sum_z z_1^2 r(z).
    double m2;
    if (params.dim == 1) {
        m2 = 2.0 * c * special::zeta(a - 1.0);
    } else {
        double half_epstein = 0.5 * ewald(0.5 * a).s0();  // sum' z_1^2 |z|^{-2-a}
        if (params.r_kind == RKind::S0)
            m2 = c * half_epstein;
        else
            m2 = c * ((params.b_bar[0] + params.b_bar[1]) * half_epstein - params.b_bar[1] * 2.0 * special::zeta(a));
    }
    return {2.0 * kPi * kPi * m2, FKind::Pow2};
}

std::complex<double> a_hat(const JumpKernel& k, const Point& u) {
    const int R = k.trunc_radius();
    const auto& kt = simd::kernels();
    if (k.dim() == 1) {
        std::vector<double> coef(static_cast<std::size_t>(R));
        for (int y = 1; y <= R; ++y) coef[y - 1] = 2.0 * k.a({y, 0});
        return {0.0, kt.sin_series(coef.data(), coef.size(), u[0], u[0])};
    }
    std::vector<double> coef(static_cast<std::size_t>(2 * R + 1));
    CompensatedSum acc;
    for (int y2 = -R; y2 <= R; ++y2) {
        for (int y1 = -R; y1 <= R; ++y1) coef[y1 + R] = k.a({y1, y2});
        acc.add(kt.sin_series(coef.data(), coef.size(), u[0], -R * u[0] + u[1] * y2));
    }
    return {0.0, acc.value()};
}

std::complex<double> a_hat_la(double alpha, double b_plus, double b_minus, double u) {
    const double s = 1.0 + alpha;
    double f = u - std::nearbyint(u);  // in [-1/2, 1/2], exact near integers
    double sign = 1.0;
    if (f < 0.0) {
        f = -f;
        sign = -1.0;
    }
    const double c = 1.0 / ((b_plus + b_minus) * special::zeta(s));
    return {0.0, sign * c * (b_plus - b_minus) * special::sine_sum(s, 2.0 * kPi * f)};
}

}  // namespace lrex
