#include "lrex/kernel/fourier.hpp"
#include "lrex/kernel/special.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace lrex {
namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kBox = 4;  // |z_i|, |k_i| <= 4: dropped terms are below e^{-pi 16}
inline int slot(int i, int j) { return (j + kBox) * (2 * kBox + 1) + (i + kBox); }
}  // namespace

Ewald2D::Ewald2D(double nu) : nu_(nu) {
    if (!(nu > 1.0)) throw std::domain_error("Ewald2D requires nu > 1");
    gamma_nu_ = std::tgamma(nu);
    pref_ = std::pow(kPi, nu) / gamma_nu_;
    double real0 = 0.0, recip = 0.0;
    for (int j = -kBox; j <= kBox; ++j)
        for (int i = -kBox; i <= kBox; ++i) {
            if (i == 0 && j == 0) continue;
            double r2 = static_cast<double>(i * i + j * j);
            double g = special::upper_gamma(nu, kPi * r2) / (gamma_nu_ * std::pow(r2, nu));
            real_coef_[slot(i, j)] = g;
            real0 += g;
            recip0_[slot(i, j)] = e_fn(kPi * r2);
            recip += recip0_[slot(i, j)];
            // Laplacian of E(pi |v|^2) at v = k is 4 pi ((nu-1) E'(a) + e^{-a}), E'(a) = ((nu-1) E(a) - e^{-a}) / a.
            double a = kPi * r2, ea = std::exp(-a);
            double de = ((nu - 1.0) * recip0_[slot(i, j)] - ea) / a;
            recip_curv_ -= kPi * ((nu - 1.0) * de + ea);
        }
    s0_ = real0 + pref_ * (recip + 1.0 / (nu - 1.0) - 1.0 / nu);
}

double Ewald2D::e_fn(double a) const { return std::pow(a, nu_ - 1.0) * special::upper_gamma(1.0 - nu_, a); }

double Ewald2D::e_deficit_small(double a) const {
    if (a == 0.0) return 0.0;
    if (nu_ == 2.0) return -std::expm1(-a) + a * special::expint_e1(a);
    if (nu_ == std::floor(nu_)) return 1.0 / (nu_ - 1.0) - e_fn(a);
    // -Gamma(1-nu) a^{nu-1} + sum_{n>=1} (-a)^n / (n! (n+1-nu)); no cancellation at small a.
    double s = -std::tgamma(1.0 - nu_) * std::pow(a, nu_ - 1.0);
    double term = 1.0;
    for (int n = 1; n < 200; ++n) {
        term *= -a / n;
        double t = term / (n + 1.0 - nu_);
        s += t;
        if (std::abs(t) < 1e-18 * std::abs(s)) break;
    }
    return s;
}

double Ewald2D::deficit(const Point& uin) const {
    // Fold into [0, 1/2]^2: the sum is even and 1-periodic in each coordinate.
    Point u;
    for (int i = 0; i < 2; ++i) {
        double f = uin[i] - std::floor(uin[i]);
        u[i] = f > 0.5 ? 1.0 - f : f;
    }
    if (u[0] == 0.0 && u[1] == 0.0) return 0.0;
    double real = 0.0;
    for (int j = -kBox; j <= kBox; ++j)
        for (int i = -kBox; i <= kBox; ++i) {
            if (i == 0 && j == 0) continue;
            double sn = std::sin(kPi * (u[0] * i + u[1] * j));
            real += 2.0 * sn * sn * real_coef_[slot(i, j)];
        }
    const double u2 = u[0] * u[0] + u[1] * u[1];
    double recip = e_deficit_small(kPi * u2);
    if (u2 < 1e-8) return real + pref_ * (recip + recip_curv_ * u2);  // O(|u|^4) remainder, no cancellation
    for (int j = -kBox; j <= kBox; ++j)
        for (int i = -kBox; i <= kBox; ++i) {
            if (i == 0 && j == 0) continue;
            double d0 = i - u[0], d1 = j - u[1];
            double a = kPi * (d0 * d0 + d1 * d1);
            double ek = a > 60.0 ? 0.0 : e_fn(a);
            recip += recip0_[slot(i, j)] - ek;
        }
    return real + pref_ * recip;
}

const Ewald2D& ewald(double nu) {
    static std::mutex mu;
    static std::map<double, std::unique_ptr<Ewald2D>> cache;
    std::lock_guard lock(mu);
    auto& slot_ptr = cache[nu];
    if (!slot_ptr) slot_ptr = std::make_unique<Ewald2D>(nu);
    return *slot_ptr;
}

}  // namespace lrex
