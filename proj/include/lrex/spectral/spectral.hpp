#pragma once

#include "lrex/kernel/fourier.hpp"
#include "lrex/kernel/jump_kernel.hpp"
#include "lrex/spectral/mesh.hpp"

#include <string>
#include <vector>

namespace lrex {

enum class Target { VarianceT, LaplaceLambda, IdAlphaT, ILowerBound, JAlphaBound, GreenUt };
const char* to_string(Target t);
Target parse_target(const std::string& s);

/// One quadrature evaluation. Fields not read by a target are ignored.
struct SpectralJob {
    int dim = 1;
    double alpha = 1.5;
    double rho = 0.5;
    Target target = Target::VarianceT;
    double t = 1.0;
    double lambda = 1.0;
    double delta = 0.05, u = 0.01;  // JAlphaBound
    double abs_tol = 1e-12, rel_tol = 1e-6;  // each in (0, 1e-3]
    double singular_pad = 0.05;              // in (0, 0.1)
    int order = 12;                          // Gauss points per panel edge
    RKind r_kind = RKind::S0;
    std::array<double, 2> b_bar{1.0, 1.0};
    // Antisymmetric part for ILowerBound.
    Variant variant = Variant::SYM;
    std::vector<double> b_plus{1.0}, b_minus{1.0};
    int trunc_radius = 1024;  // table-based a_hat for variants without a closed form
    int outer_grid = 64;      // d = 2 ILowerBound
};

/// Throws BadInterval on out-of-range tolerances, pad, or target parameters.
void validate(const SpectralJob& job);
FourierSymbolParams symbol_of(const SpectralJob& job);

struct SpectralResult {
    Target target = Target::VarianceT;
    double t_or_lambda = 0.0;
    double value = 0.0;
    double err_est = 0.0;
    std::string regime_tag;
    double bound = 0.0;      // JAlphaBound only
    double companion = 0.0;  // LaplaceLambda with cross-check: time-domain route
};

/// Growth of I_{d,alpha}(t) as t -> infinity, e.g. "t^{2-1/alpha}".
std::string regime_tag(int dim, double alpha);

/// theta tabulated on a torus mesh graded toward the zero of theta. `scale`
/// is the largest t (or 1/lambda) the mesh must resolve.
class ThetaMesh {
public:
    ThetaMesh(const SpectralJob& job, double scale);

    const Nodes& nodes() const { return nodes_; }
    const std::vector<double>& theta() const { return theta_; }

    /// int t^2 g(theta t) du with g(x) = (x - 1 + e^{-x}) / x^2.
    SpectralResult id_alpha(double t) const;
    /// int du / (lambda + theta)
    SpectralResult resolvent(double lambda) const;
    /// int cos(2 pi k.x) t h(theta t) dk, h(x) = (1 - e^{-x}) / x.
    SpectralResult green(double t, const std::array<int, 2>& x) const;
    /// int (t h(theta t))^2 dk = sum_x u_t(x)^2.
    SpectralResult green_sq(double t) const;
    /// int_0^inf e^{-lambda t} id_alpha(t) dt by Gauss panels in t.
    SpectralResult laplace_of_id_alpha(double lambda) const;

private:
    SpectralJob job_;
    Nodes nodes_;
    std::vector<double> theta_;
    SpectralResult finish(double hi, double lo, double floor) const;
};

/// Mesh depth such that theta at the innermost edge times `scale` is below 1e-12.
int mesh_depth(const FourierSymbolParams& sym, double width0, double scale);

// Free functions; curves share one mesh across grid points.
SpectralResult variance_sym(const SpectralJob& job);
std::vector<SpectralResult> variance_sym_curve(const SpectralJob& job, const std::vector<double>& ts);
SpectralResult id_alpha_t(const SpectralJob& job);
std::vector<SpectralResult> id_alpha_t_curve(const SpectralJob& job, const std::vector<double>& ts);
/// `cross_check` fills companion with the time-domain Laplace transform of variance_sym.
SpectralResult laplace_sym(const SpectralJob& job, bool cross_check = false);
std::vector<SpectralResult> laplace_sym_curve(const SpectralJob& job, const std::vector<double>& lambdas);
/// Gauss order grows with the larger of |x_i| (capped at 64); far sites throw QuadratureFail.
SpectralResult green_ut(const SpectralJob& job, const std::array<int, 2>& x);
SpectralResult green_sq_sum(const SpectralJob& job);

/// Torus analog of laplace_sym: 2 chi lambda^{-2} L^{-1} sum_k 1 / (lambda + theta_L(k/L)),
/// theta_L built from the kernel folded onto Z/L.
double laplace_torus(const JumpKernel& k, int L, double rho, double lambda);

std::string results_csv(const SpectralJob& job, const std::vector<SpectralResult>& rows);

}  // namespace lrex
