#pragma once

#include "lrex/spectral/spectral.hpp"

namespace lrex {

/// I_d(lambda, rho) = int_{T^d} du / F(u) with
///   F = (lambda + theta) + (1-2rho)^2 |a_hat|^2 / (lambda + theta)
///       + chi(rho) int_{T^d} |a_hat(s) + a_hat(u-s)|^2 / (lambda + theta(s) + theta(u-s)) ds,
/// theta built from s0. d = 1: graded meshes on both levels, InnerGridTooCoarse when
/// the two inner rules disagree beyond rel_tol / 10. d = 2: vertex grid of side
/// outer_grid and its refinement, with a graded correction on the origin cell;
/// regime_tag reports "grid-limited" when the two grids disagree beyond rel_tol.
/// Kernels with a_hat = 0 go through the theta mesh of laplace_sym.
SpectralResult i_lower_bound(const SpectralJob& job);
std::vector<SpectralResult> i_lower_bound_curve(const SpectralJob& job, const std::vector<double>& lambdas);

/// int_0^delta ds / (lambda + theta(s) + theta(s - u)), d = 1, theta from s0.
SpectralResult j_alpha_value(const SpectralJob& job);

struct JAlphaConstants {
    double C0 = 0.0, C1 = 0.0;
};

/// Constants of the analytic bound for the given alpha and delta, cached.
/// alpha in [1, 2): from the minimum of theta(s) + theta(s - u) against the
/// matching power at u = 1e-2. alpha = 2: C1 likewise, C0 the largest value/shape
/// over lambda in [1e-9, 1e-3], u in [1e-6, 1e-2] with a 2% margin.
JAlphaConstants j_alpha_constants(double alpha, double delta);

/// Analytic bound with the frozen constants.
double j_alpha_analytic(double alpha, const JAlphaConstants& c, double lambda, double u);

/// value and bound; throws BoundViolated when value > bound.
SpectralResult j_alpha_bound(const SpectralJob& job);

}  // namespace lrex
