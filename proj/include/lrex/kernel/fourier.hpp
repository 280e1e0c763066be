#pragma once

#include "lrex/kernel/jump_kernel.hpp"

#include <array>
#include <complex>

namespace lrex {

/// Which symmetric transition function feeds theta.
///  S0: radial c0/|z|^{d+alpha};  S: axis-weighted symmetric part of a
///  constant-weight kernel, weights b_bar (d = 2; identical to S0 in d = 1).
enum class RKind { S0, S };

struct FourierSymbolParams {
    int dim = 1;
    double alpha = 1.5;
    RKind r_kind = RKind::S0;
    long z_max = 0;            // 0 selects 4096 (d = 1) or 64 per axis (d = 2)
    double tail_tol = 1e-8;    // must lie in (0, 1e-6]
    std::array<double, 2> b_bar{1.0, 1.0};
    bool adaptive = true;      // raise z_max x4 on an unmet tail bound
    long z_cap = 1L << 26;     // ceiling for adaptive growth (d = 2 uses its square root)
};

struct ThetaValue {
    double value = 0.0;
    double bracket = 0.0;  // |true - value| <= bracket
    long z_used = 0;
};

using Point = std::array<double, 2>;

/// Truncated series with exact mass tail and an Abel-summation bracket on the
/// oscillatory remainder. Throws TailNotConverged when the bracket stays above tail_tol.
ThetaValue theta(const FourierSymbolParams& params, const Point& u);

/// Closed-form evaluation (polylogarithm expansion in d = 1, Ewald splitting in d = 2).
double theta_fast(const FourierSymbolParams& params, const Point& u);

/// Exact finite sum 2 sum_y s(y) sin^2(pi u.y) over a built kernel's table.
double theta_table(const JumpKernel& k, const Point& u);

enum class FKind { PowAlpha, Pow2Log, Pow2 };
const char* to_string(FKind k);

struct Asymptote {
    double J = 0.0;
    FKind kind = FKind::PowAlpha;
};

/// Constant J with theta(u) ~ J F_alpha(|u|) as u -> 0 (along e_1 when r is anisotropic).
Asymptote theta_asymptote(const FourierSymbolParams& params);

/// F_alpha(x): x^alpha (alpha < 2), x^2 |log x| (alpha = 2), x^2 (alpha > 2).
double f_alpha(double alpha, double x);

/// Normalizing constant of the symmetric kernel r on the infinite lattice.
double r_norm(const FourierSymbolParams& params);

/// Transform of the antisymmetric part over a kernel's table; purely imaginary.
std::complex<double> a_hat(const JumpKernel& k, const Point& u);

/// Same for the untruncated d = 1 LA law with weights b_plus, b_minus.
std::complex<double> a_hat_la(double alpha, double b_plus, double b_minus, double u);

/// Radial lattice sums on Z^2 by Ewald splitting, exponent 2 nu with nu > 1.
class Ewald2D {
public:
    explicit Ewald2D(double nu);
    double nu() const { return nu_; }
    /// sum' |z|^{-2 nu}
    double s0() const { return s0_; }
    /// sum' (1 - cos 2 pi u.z) |z|^{-2 nu}, any u.
    double deficit(const Point& u) const;

private:
    double nu_, s0_, gamma_nu_, pref_;
    std::array<double, 81> real_coef_{};  // Gamma(nu, pi|z|^2) / (Gamma(nu) |z|^{2 nu}), z in [-4,4]^2
    std::array<double, 81> recip0_{};     // E(pi |k|^2), k in [-4,4]^2
    double recip_curv_ = 0.0;             // reciprocal sum ~ recip_curv_ |u|^2 near u = 0
    double e_fn(double a) const;          // a^{nu-1} Gamma(1-nu, a)
    double e_deficit_small(double a) const;  // E(0) - E(a)
};

/// Cached Ewald2D per nu (thread-safe).
const Ewald2D& ewald(double nu);

}  // namespace lrex
