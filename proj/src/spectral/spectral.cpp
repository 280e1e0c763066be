#include "lrex/spectral/spectral.hpp"

#include "lrex/error.hpp"
#include "lrex/kernel/compensated.hpp"
#include "lrex/kernel/special.hpp"
#include "lrex/oracle/exact.hpp"
#include "lrex/simd/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace lrex {

namespace {
constexpr double kPi = std::numbers::pi;
}

const char* to_string(Target t) {
    switch (t) {
        case Target::VarianceT: return "VarianceT";
        case Target::LaplaceLambda: return "LaplaceLambda";
        case Target::IdAlphaT: return "IdAlphaT";
        case Target::ILowerBound: return "ILowerBound";
        case Target::JAlphaBound: return "JAlphaBound";
        case Target::GreenUt: return "GreenUt";
    }
    return "?";
}

Target parse_target(const std::string& s) {
    for (Target t : {Target::VarianceT, Target::LaplaceLambda, Target::IdAlphaT, Target::ILowerBound,
                     Target::JAlphaBound, Target::GreenUt})
        if (s == to_string(t)) return t;
    throw Error(ErrorCode::ParseError, "unknown target '" + s + "'");
}

void validate(const SpectralJob& job) {
    if (job.dim != 1 && job.dim != 2) throw Error(ErrorCode::BadSize, "dim must be 1 or 2");
    if (!(job.alpha > 0.0)) throw Error(ErrorCode::BadAlpha, "alpha must be positive");
    if (!(job.rho > 0.0 && job.rho < 1.0)) throw Error(ErrorCode::BadDensity, "rho must lie in (0, 1)");
    if (!(job.abs_tol > 0.0 && job.abs_tol <= 1e-3) || !(job.rel_tol > 0.0 && job.rel_tol <= 1e-3))
        throw Error(ErrorCode::BadInterval, "tolerances must lie in (0, 1e-3]");
    if (!(job.singular_pad > 0.0 && job.singular_pad < 0.1))
        throw Error(ErrorCode::BadInterval, "singular_pad must lie in (0, 0.1)");
    if (job.order < 4 || job.order > 64) throw Error(ErrorCode::BadInterval, "order must lie in [4, 64]");
    switch (job.target) {
        case Target::VarianceT:
        case Target::IdAlphaT:
        case Target::GreenUt:
            if (!(job.t > 0.0)) throw Error(ErrorCode::BadInterval, "t must be positive");
            break;
        case Target::LaplaceLambda:
        case Target::ILowerBound:
            if (!(job.lambda > 0.0)) throw Error(ErrorCode::BadInterval, "lambda must be positive");
            break;
        case Target::JAlphaBound:
            if (job.dim != 1) throw Error(ErrorCode::BadSize, "JAlphaBound is one-dimensional");
            if (!(job.lambda > 0.0)) throw Error(ErrorCode::BadInterval, "lambda must be positive");
            if (!(job.u > 0.0 && job.u < job.delta && job.delta < 0.1))
                throw Error(ErrorCode::BadInterval, "need 0 < u < delta < 0.1");
            break;
    }
}

FourierSymbolParams symbol_of(const SpectralJob& job) {
    FourierSymbolParams p;
    p.dim = job.dim;
    p.alpha = job.alpha;
    p.r_kind = job.r_kind;
    p.b_bar = job.b_bar;
    return p;
}

std::string regime_tag(int dim, double alpha) {
    if (dim == 1) {
        if (alpha < 1.0) return "t";
        if (alpha == 1.0) return "t log t";
        if (alpha < 2.0) return "t^{2-1/alpha}";
        if (alpha == 2.0) return "t^{3/2} (log t)^{-1/2}";
        return "t^{3/2}";
    }
    if (alpha < 2.0) return "t";
    if (alpha == 2.0) return "t log log t";
    return "t log t";
}

int mesh_depth(const FourierSymbolParams& sym, double width0, double scale) {
    const Asymptote as = theta_asymptote(sym);
    for (int k = 0; k < 4000; ++k) {
        double w = width0 * std::ldexp(1.0, -k);
        if (w == 0.0 || as.J * f_alpha(sym.alpha, w) * scale < 1e-12) return k;
    }
    return 4000;
}

ThetaMesh::ThetaMesh(const SpectralJob& job, double scale) : job_(job) {
    validate(job);
    const FourierSymbolParams sym = symbol_of(job);
    nodes_ = torus_mesh(job.dim, job.singular_pad, mesh_depth(sym, job.singular_pad, scale), job.order);
    theta_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        Point u{nodes_.x[i], job.dim == 2 ? nodes_.x2[i] : 0.0};
        theta_[i] = std::max(0.0, theta_fast(sym, u));
    }
}

SpectralResult ThetaMesh::finish(double hi, double lo, double floor) const {
    SpectralResult r;
    r.value = hi;
    r.err_est = std::abs(hi - lo) + 1e-14 * std::abs(hi);
    if (!std::isfinite(hi) || r.err_est > std::max(job_.abs_tol * floor, job_.rel_tol * std::abs(hi)))
        throw Error(ErrorCode::QuadratureFail, "mesh rules disagree: " + std::to_string(hi) + " vs " +
                                                   std::to_string(lo));
    return r;
}

SpectralResult ThetaMesh::id_alpha(double t) const {
    const auto& k = simd::kernels();
    const std::size_t n = nodes_.size();
    double hi = k.variance_reduce(theta_.data(), nodes_.w_hi.data(), n, t);
    double lo = k.variance_reduce(theta_.data(), nodes_.w_lo.data(), n, t);
    SpectralResult r = finish(hi, lo, 1.0);
    r.target = Target::IdAlphaT;
    r.t_or_lambda = t;
    r.regime_tag = regime_tag(job_.dim, job_.alpha);
    return r;
}

SpectralResult ThetaMesh::resolvent(double lambda) const {
    const auto& k = simd::kernels();
    const std::size_t n = nodes_.size();
    double hi = k.resolvent_reduce(theta_.data(), nodes_.w_hi.data(), n, lambda);
    double lo = k.resolvent_reduce(theta_.data(), nodes_.w_lo.data(), n, lambda);
    SpectralResult r = finish(hi, lo, 1.0);
    r.target = Target::LaplaceLambda;
    r.t_or_lambda = lambda;
    return r;
}

SpectralResult ThetaMesh::green(double t, const std::array<int, 2>& x) const {
    const std::size_t n = nodes_.size();
    std::vector<double> whi(n), wlo(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Averaging e^{-2 pi i k.x} over the reflections of the fundamental domain leaves a cosine product.
        double c = std::cos(2.0 * kPi * nodes_.x[i] * x[0]);
        if (job_.dim == 2) c *= std::cos(2.0 * kPi * nodes_.x2[i] * x[1]);
        whi[i] = nodes_.w_hi[i] * c;
        wlo[i] = nodes_.w_lo[i] * c;
    }
    const auto& k = simd::kernels();
    double hi = k.green_reduce(theta_.data(), whi.data(), n, t);
    double lo = k.green_reduce(theta_.data(), wlo.data(), n, t);
    SpectralResult r = finish(hi, lo, t);
    r.target = Target::GreenUt;
    r.t_or_lambda = t;
    return r;
}

SpectralResult ThetaMesh::green_sq(double t) const {
    const auto& k = simd::kernels();
    const std::size_t n = nodes_.size();
    double hi = k.green_sq_reduce(theta_.data(), nodes_.w_hi.data(), n, t);
    double lo = k.green_sq_reduce(theta_.data(), nodes_.w_lo.data(), n, t);
    SpectralResult r = finish(hi, lo, t * t);
    r.target = Target::GreenUt;
    r.t_or_lambda = t;
    return r;
}

SpectralResult ThetaMesh::laplace_of_id_alpha(double lambda) const {
    const double T = 50.0 / lambda;
    Nodes tn;
    append_nodes(tn, graded_panels(0.0, T, T / 64.0, 40), 16);
    double hi = 0.0, lo = 0.0, err = 0.0;
    for (std::size_t i = 0; i < tn.size(); ++i) {
        const double t = tn.x[i];
        const SpectralResult v = id_alpha(t);
        const double e = std::exp(-lambda * t);
        hi += tn.w_hi[i] * e * v.value;
        lo += tn.w_lo[i] * e * v.value;
        err += (tn.w_hi[i] + tn.w_lo[i]) * e * v.err_est;
    }
    SpectralResult r;
    r.target = Target::LaplaceLambda;
    r.t_or_lambda = lambda;
    r.value = hi;
    r.err_est = std::abs(hi - lo) + err;
    return r;
}

SpectralResult variance_sym(const SpectralJob& job) { return variance_sym_curve(job, {job.t}).front(); }

std::vector<SpectralResult> variance_sym_curve(const SpectralJob& job, const std::vector<double>& ts) {
    std::vector<SpectralResult> out = id_alpha_t_curve(job, ts);
    const double chi2 = 2.0 * job.rho * (1.0 - job.rho);
    for (auto& r : out) {
        r.target = Target::VarianceT;
        r.value *= chi2;
        r.err_est *= chi2;
    }
    return out;
}

SpectralResult id_alpha_t(const SpectralJob& job) { return id_alpha_t_curve(job, {job.t}).front(); }

std::vector<SpectralResult> id_alpha_t_curve(const SpectralJob& job, const std::vector<double>& ts) {
    double t_max = 0.0;
    for (double t : ts) {
        if (!(t > 0.0)) throw Error(ErrorCode::BadInterval, "t must be positive");
        t_max = std::max(t_max, t);
    }
    ThetaMesh mesh(job, t_max);
    std::vector<SpectralResult> out;
    for (double t : ts) out.push_back(mesh.id_alpha(t));
    return out;
}

SpectralResult laplace_sym(const SpectralJob& job, bool cross_check) {
    ThetaMesh mesh(job, 50.0 / job.lambda);
    const double chi2 = 2.0 * job.rho * (1.0 - job.rho);
    const double l2 = job.lambda * job.lambda;
    SpectralResult r = mesh.resolvent(job.lambda);
    r.value *= chi2 / l2;
    r.err_est *= chi2 / l2;
    if (cross_check) r.companion = chi2 * mesh.laplace_of_id_alpha(job.lambda).value;
    return r;
}

std::vector<SpectralResult> laplace_sym_curve(const SpectralJob& job, const std::vector<double>& lambdas) {
    double l_min = INFINITY;
    for (double l : lambdas) {
        if (!(l > 0.0)) throw Error(ErrorCode::BadInterval, "lambda must be positive");
        l_min = std::min(l_min, l);
    }
    ThetaMesh mesh(job, 1.0 / l_min);
    const double chi2 = 2.0 * job.rho * (1.0 - job.rho);
    std::vector<SpectralResult> out;
    for (double l : lambdas) {
        SpectralResult r = mesh.resolvent(l);
        r.value *= chi2 / (l * l);
        r.err_est *= chi2 / (l * l);
        out.push_back(r);
    }
    return out;
}

SpectralResult green_ut(const SpectralJob& job, const std::array<int, 2>& x) {
    // Outer panels reach width ~0.2; Gauss order must follow the phase 2 pi |x| w across them.
    SpectralJob j = job;
    const int reach = std::max(std::abs(x[0]), std::abs(x[1]));
    j.order = std::min(64, std::max(job.order, 12 + static_cast<int>(std::ceil(0.7 * reach))));
    ThetaMesh mesh(j, job.t);
    return mesh.green(job.t, x);
}

SpectralResult green_sq_sum(const SpectralJob& job) {
    ThetaMesh mesh(job, job.t);
    return mesh.green_sq(job.t);
}

double laplace_torus(const JumpKernel& k, int L, double rho, double lambda) {
    if (k.dim() != 1) throw Error(ErrorCode::BadSize, "torus analog is one-dimensional");
    const std::vector<double> rate = ring_rates(k, L);
    CompensatedSum acc;
    for (int j = 0; j < L; ++j) {
        double th = 0.0;
        for (int z = 1; z < L; ++z) th += rate[z] * (1.0 - std::cos(2.0 * kPi * j * z / L));
        acc.add(1.0 / (lambda + th));
    }
    return 2.0 * rho * (1.0 - rho) / (lambda * lambda) * acc.value() / L;
}

std::string results_csv(const SpectralJob& job, const std::vector<SpectralResult>& rows) {
    std::string out = "target,dim,alpha,rho,t_or_lambda,value,err_est,regime_tag\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", to_string(r.target), job.dim,
                      job.alpha, job.rho, r.t_or_lambda, r.value, r.err_est, r.regime_tag.c_str());
        out += buf;
    }
    return out;
}

}  // namespace lrex
