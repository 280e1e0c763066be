#include "lrex/spectral/lower_bound.hpp"

#include "lrex/error.hpp"
#include "lrex/kernel/special.hpp"
#include "lrex/simd/kernels.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace lrex {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kInnerDepth = 30;

FourierSymbolParams s0_symbol(int dim, double alpha) {
    FourierSymbolParams p;
    p.dim = dim;
    p.alpha = alpha;
    return p;
}

bool has_antisymmetric_part(const SpectralJob& job) {
    if (job.variant == Variant::SYM) return false;
    for (std::size_t i = 0; i < job.b_plus.size(); ++i)
        if (job.b_plus[i] != job.b_minus[i]) return true;
    return job.variant == Variant::MZA;
}

// Imaginary part of a_hat along one coordinate, d = 1.
std::function<double(double)> a_hat_1d(const SpectralJob& job) {
    if (!has_antisymmetric_part(job)) return {};
    if (job.variant == Variant::LA && job.b_plus.size() == 1) {
        const double a = job.alpha, bp = job.b_plus[0], bm = job.b_minus[0];
        return [a, bp, bm](double u) { return a_hat_la(a, bp, bm, u).imag(); };
    }
    JumpKernel k = build_kernel(1, job.alpha, job.b_plus, job.b_minus, job.variant, job.trunc_radius);
    auto coef = std::make_shared<std::vector<double>>(static_cast<std::size_t>(k.trunc_radius()));
    for (int y = 1; y <= k.trunc_radius(); ++y) (*coef)[y - 1] = 2.0 * k.a({y, 0});
    return [coef](double u) { return simd::kernels().sin_series(coef->data(), coef->size(), u, u); };
}

void check_lambdas(const std::vector<double>& lambdas) {
    for (double l : lambdas)
        if (!(l > 0.0)) throw Error(ErrorCode::BadInterval, "lambda must be positive");
}

std::vector<SpectralResult> lower_bound_1d(const SpectralJob& job, const std::vector<double>& lambdas) {
    const FourierSymbolParams sym = s0_symbol(1, job.alpha);
    const auto A = a_hat_1d(job);
    const double chi = job.rho * (1.0 - job.rho);
    const double drift = (1.0 - 2.0 * job.rho) * (1.0 - 2.0 * job.rho);
    double l_min = INFINITY;
    for (double l : lambdas) l_min = std::min(l_min, l);
    const Nodes outer = torus_mesh(1, job.singular_pad, mesh_depth(sym, job.singular_pad, 1.0 / l_min), job.order);
    const std::size_t n_out = outer.size(), n_l = lambdas.size();

    std::vector<double> th(n_out), au(n_out, 0.0);
    for (std::size_t i = 0; i < n_out; ++i) {
        th[i] = std::max(0.0, theta_fast(sym, {outer.x[i], 0.0}));
        if (A) au[i] = A(outer.x[i]);
    }

    // Inner integral over one period = twice the integral over [u/2, u/2 + 1/2]
    // (s -> u - s symmetry); the only zero of the denominator there is s = u.
    std::vector<double> inner_hi(n_out * n_l, 0.0), inner_lo(n_out * n_l, 0.0);
    if (A) {
        const auto& kt = simd::kernels();
        Nodes in;
        std::vector<double> num, den;
        for (std::size_t i = 0; i < n_out; ++i) {
            const double u = outer.x[i];
            in = Nodes{};
            append_nodes(in, graded_panels_toward_b(0.5 * u, u, 0.25 * u, kInnerDepth), job.order, 2.0);
            append_nodes(in, graded_panels(u, 0.5 * u + 0.5, 0.25 * u, kInnerDepth), job.order, 2.0);
            num.resize(in.size());
            den.resize(in.size());
            for (std::size_t j = 0; j < in.size(); ++j) {
                const double s = in.x[j];
                const double a = A(s) + A(u - s);
                num[j] = a * a;
                den[j] = std::max(0.0, theta_fast(sym, {s, 0.0})) + std::max(0.0, theta_fast(sym, {u - s, 0.0}));
            }
            for (std::size_t l = 0; l < n_l; ++l) {
                inner_hi[i * n_l + l] = kt.ratio_reduce(num.data(), den.data(), in.w_hi.data(), in.size(), lambdas[l]);
                inner_lo[i * n_l + l] = kt.ratio_reduce(num.data(), den.data(), in.w_lo.data(), in.size(), lambdas[l]);
            }
        }
    }

    std::vector<SpectralResult> out;
    for (std::size_t l = 0; l < n_l; ++l) {
        const double lam = lambdas[l];
        double hi = 0.0, lo_outer = 0.0, lo_inner = 0.0;
        for (std::size_t i = 0; i < n_out; ++i) {
            const double base = lam + th[i] + drift * au[i] * au[i] / (lam + th[i]);
            const double f_hi = base + chi * inner_hi[i * n_l + l];
            const double f_lo = base + chi * inner_lo[i * n_l + l];
            hi += outer.w_hi[i] / f_hi;
            lo_outer += outer.w_lo[i] / f_hi;
            lo_inner += outer.w_hi[i] / f_lo;
        }
        SpectralResult r;
        r.target = Target::ILowerBound;
        r.t_or_lambda = lam;
        r.value = hi;
        const double inner_err = std::abs(hi - lo_inner), outer_err = std::abs(hi - lo_outer);
        r.err_est = inner_err + outer_err + 1e-14 * hi;
        if (inner_err > 0.1 * job.rel_tol * hi)
            throw Error(ErrorCode::InnerGridTooCoarse, "inner rules disagree at lambda = " + std::to_string(lam));
        if (!std::isfinite(hi) || outer_err > std::max(job.abs_tol, job.rel_tol * hi))
            throw Error(ErrorCode::QuadratureFail, "outer rules disagree at lambda = " + std::to_string(lam));
        out.push_back(r);
    }
    return out;
}

// Imaginary part of a_hat on the vertex grid k / N, from the kernel folded onto Z_N^2.
std::vector<double> a_hat_grid(const JumpKernel& k, int N) {
    std::vector<double> af(static_cast<std::size_t>(N) * N, 0.0);
    for (const Disp& y : k.displacements()) {
        const double a = k.a(y);
        if (a == 0.0) continue;
        const int i = ((y[0] % N) + N) % N, j = ((y[1] % N) + N) % N;
        af[static_cast<std::size_t>(j) * N + i] += a;
    }
    std::vector<double> cs(N), sn(N);
    for (int m = 0; m < N; ++m) {
        cs[m] = std::cos(2.0 * kPi * m / N);
        sn[m] = std::sin(2.0 * kPi * m / N);
    }
    // First pass over y1: C1, S1 indexed [y2][k1].
    std::vector<double> c1(af.size(), 0.0), s1(af.size(), 0.0);
    for (int y2 = 0; y2 < N; ++y2)
        for (int k1 = 0; k1 < N; ++k1) {
            double c = 0.0, s = 0.0;
            for (int y1 = 0; y1 < N; ++y1) {
                const double v = af[static_cast<std::size_t>(y2) * N + y1];
                const int m = (k1 * y1) % N;
                c += v * cs[m];
                s += v * sn[m];
            }
            c1[static_cast<std::size_t>(y2) * N + k1] = c;
            s1[static_cast<std::size_t>(y2) * N + k1] = s;
        }
    // sin(x + y) = sin x cos y + cos x sin y.
    std::vector<double> out(af.size(), 0.0);
    for (int k2 = 0; k2 < N; ++k2)
        for (int k1 = 0; k1 < N; ++k1) {
            double acc = 0.0;
            for (int y2 = 0; y2 < N; ++y2) {
                const int m = (k2 * y2) % N;
                acc += s1[static_cast<std::size_t>(y2) * N + k1] * cs[m] + c1[static_cast<std::size_t>(y2) * N + k1] * sn[m];
            }
            out[static_cast<std::size_t>(k2) * N + k1] = acc;
        }
    return out;
}

// int over the cell [-h, h]^2 of du / (lambda + theta(u)); the inner term vanishes at u = 0.
double origin_cell(const FourierSymbolParams& sym, double h, double lambda, int order) {
    const Nodes m = torus_mesh(2, 0.5, 60, order);
    const double scale = 2.0 * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double th = std::max(0.0, theta_fast(sym, {m.x[i] * scale, m.x2[i] * scale}));
        acc += m.w_hi[i] * scale * scale / (lambda + th);
    }
    return acc;
}

std::vector<double> lower_bound_grid(const SpectralJob& job, const std::vector<double>& lambdas, int N) {
    const FourierSymbolParams sym = s0_symbol(2, job.alpha);
    const double chi = job.rho * (1.0 - job.rho);
    const double drift = (1.0 - 2.0 * job.rho) * (1.0 - 2.0 * job.rho);
    const std::size_t M = static_cast<std::size_t>(N) * N;
    std::vector<double> th(M), A(M, 0.0);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i)
            th[static_cast<std::size_t>(j) * N + i] = std::max(0.0, theta_fast(sym, {double(i) / N, double(j) / N}));
    if (has_antisymmetric_part(job)) {
        std::vector<double> bp = job.b_plus, bm = job.b_minus;
        if (bp.size() == 1) bp.push_back(bp[0]);
        if (bm.size() == 1) bm.push_back(bm[0]);
        const int R = std::min(job.trunc_radius, 4 * N);
        A = a_hat_grid(build_kernel(2, job.alpha, bp, bm, job.variant, R), N);
    }
    const auto& kt = simd::kernels();
    const double cell = 1.0 / static_cast<double>(M);
    std::vector<double> sums(lambdas.size(), 0.0);
    std::vector<double> num(M), den(M), w(M, cell);
    for (int uj = 0; uj < N; ++uj)
        for (int ui = 0; ui < N; ++ui) {
            if (ui == 0 && uj == 0) continue;
            const std::size_t u = static_cast<std::size_t>(uj) * N + ui;
            for (int sj = 0; sj < N; ++sj)
                for (int si = 0; si < N; ++si) {
                    const std::size_t s = static_cast<std::size_t>(sj) * N + si;
                    const std::size_t d = static_cast<std::size_t>((uj - sj + N) % N) * N + (ui - si + N) % N;
                    const double a = A[s] + A[d];
                    num[s] = a * a;
                    den[s] = th[s] + th[d];
                }
            for (std::size_t l = 0; l < lambdas.size(); ++l) {
                const double lam = lambdas[l];
                const double inner = kt.ratio_reduce(num.data(), den.data(), w.data(), M, lam);
                const double F = lam + th[u] + drift * A[u] * A[u] / (lam + th[u]) + chi * inner;
                sums[l] += cell / F;
            }
        }
    for (std::size_t l = 0; l < lambdas.size(); ++l)
        sums[l] += origin_cell(sym, 0.5 / N, lambdas[l], job.order);
    return sums;
}

}  // namespace

std::vector<SpectralResult> i_lower_bound_curve(const SpectralJob& job, const std::vector<double>& lambdas) {
    SpectralJob j = job;
    j.target = Target::ILowerBound;
    j.lambda = lambdas.empty() ? 1.0 : lambdas.front();
    validate(j);
    check_lambdas(lambdas);
    if (!has_antisymmetric_part(job)) {
        // Both correction terms vanish; F = lambda + theta.
        double l_min = INFINITY;
        for (double l : lambdas) l_min = std::min(l_min, l);
        const ThetaMesh mesh(job, 50.0 / l_min);
        std::vector<SpectralResult> out;
        for (double l : lambdas) {
            SpectralResult r = mesh.resolvent(l);
            r.target = Target::ILowerBound;
            out.push_back(r);
        }
        return out;
    }
    if (job.dim == 1) return lower_bound_1d(job, lambdas);
    const std::vector<double> coarse = lower_bound_grid(job, lambdas, job.outer_grid);
    const std::vector<double> fine = lower_bound_grid(job, lambdas, 2 * job.outer_grid);
    std::vector<SpectralResult> out;
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        SpectralResult r;
        r.target = Target::ILowerBound;
        r.t_or_lambda = lambdas[l];
        r.value = fine[l];
        r.err_est = std::abs(fine[l] - coarse[l]);
        if (r.err_est > job.rel_tol * std::abs(fine[l])) r.regime_tag = "grid-limited";
        out.push_back(r);
    }
    return out;
}

SpectralResult i_lower_bound(const SpectralJob& job) { return i_lower_bound_curve(job, {job.lambda}).front(); }

SpectralResult j_alpha_value(const SpectralJob& job) {
    SpectralJob j = job;
    j.target = Target::JAlphaBound;
    validate(j);
    const FourierSymbolParams sym = s0_symbol(1, job.alpha);
    const double u = job.u;
    Nodes nd;
    append_nodes(nd, graded_panels(0.0, 0.5 * u, 0.25 * u, 40), job.order);
    append_nodes(nd, graded_panels_toward_b(0.5 * u, u, 0.25 * u, 40), job.order);
    append_nodes(nd, graded_panels(u, job.delta, 0.25 * u, 40), job.order);
    std::vector<double> den(nd.size());
    for (std::size_t i = 0; i < nd.size(); ++i)
        den[i] = std::max(0.0, theta_fast(sym, {nd.x[i], 0.0})) + std::max(0.0, theta_fast(sym, {nd.x[i] - u, 0.0}));
    const auto& kt = simd::kernels();
    const double hi = kt.resolvent_reduce(den.data(), nd.w_hi.data(), nd.size(), job.lambda);
    const double lo = kt.resolvent_reduce(den.data(), nd.w_lo.data(), nd.size(), job.lambda);
    SpectralResult r;
    r.target = Target::JAlphaBound;
    r.t_or_lambda = job.lambda;
    r.value = hi;
    r.err_est = std::abs(hi - lo) + 1e-14 * hi;
    if (!std::isfinite(hi) || r.err_est > std::max(job.abs_tol, job.rel_tol * hi))
        throw Error(ErrorCode::QuadratureFail, "J_alpha rules disagree");
    return r;
}

namespace {

constexpr double kRefLambda = 1e-3, kRefU = 1e-2;

// min over s in (0, delta] of ratio(s), on a graded grid that resolves s = 0 and s = u.
double min_ratio(double delta, double u, const std::function<double(double)>& ratio) {
    double best = INFINITY;
    for (int k = 0; k <= 4000; ++k) best = std::min(best, ratio(delta * (k + 0.5) / 4001.0));
    for (int k = 1; k <= 60; ++k) {
        const double e = u * std::ldexp(1.0, -k);
        best = std::min({best, ratio(e), ratio(u - e), ratio(u + e)});
    }
    return best;
}

double shape_alpha2(double C1, double lambda, double u) {
    const double x = lambda + C1 * std::abs(u * u * std::log(u));
    return 1.0 / std::sqrt(x * std::abs(std::log(x)));
}

}  // namespace

JAlphaConstants j_alpha_constants(double alpha, double delta) {
    if (!(alpha >= 1.0 && alpha <= 2.0)) throw Error(ErrorCode::BadAlpha, "J_alpha bound needs alpha in [1, 2]");
    static std::mutex mu;
    static std::map<std::pair<double, double>, JAlphaConstants> cache;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find({alpha, delta}); it != cache.end()) return it->second;
    }
    const FourierSymbolParams sym = s0_symbol(1, alpha);
    auto th = [&](double s) { return theta_fast(sym, {s, 0.0}); };
    JAlphaConstants c;
    if (alpha == 1.0) {
        // theta(s) >= kappa0 |s| on (-delta, delta) gives J <= 1/kappa0 + log(1 + 2 kappa0 delta / (lambda + kappa0 u)) / (2 kappa0).
        const double k0 = min_ratio(delta, kRefU, [&](double s) { return th(s) / s; });
        c.C1 = std::max(1.0 / k0, 2.0 * k0 * delta);
        c.C0 = 0.5 / k0 + (1.0 / k0) / std::log(1.0 + c.C1 / (1.0 + delta / c.C1));  // valid for lambda <= 1
    } else if (alpha < 2.0) {
        // theta(s) + theta(s - u) >= kappa1 (s^alpha + u^alpha) gives C0 = kappa1^{-1/alpha} (pi/alpha) / sin(pi/alpha).
        const double k1 = min_ratio(delta, kRefU, [&](double s) {
            return (th(s) + th(s - kRefU)) / (std::pow(s, alpha) + std::pow(kRefU, alpha));
        });
        c.C1 = 1.0 / k1;
        c.C0 = std::pow(k1, -1.0 / alpha) * (kPi / alpha) / std::sin(kPi / alpha);
    } else {
        const double lu = std::abs(kRefU * kRefU * std::log(kRefU));
        c.C1 = min_ratio(delta, kRefU, [&](double s) {
            return (th(s) + th(s - kRefU)) / (std::abs(s * s * std::log(s)) + lu);
        });
        // Empirical prefactor: largest value / shape over a grid anchored at the
        // reference point, with a 2% margin for quadrature error.
        SpectralJob j;
        j.alpha = alpha;
        j.target = Target::JAlphaBound;
        j.delta = delta;
        double worst = 0.0;
        for (double lam = kRefLambda; lam >= 1e-9; lam /= 10.0)
            for (double u = kRefU; u >= 1e-6; u /= 10.0) {
                if (u >= delta) continue;
                j.lambda = lam;
                j.u = u;
                worst = std::max(worst, j_alpha_value(j).value / shape_alpha2(c.C1, lam, u));
            }
        c.C0 = 1.02 * worst;
    }
    std::lock_guard lock(mu);
    cache[{alpha, delta}] = c;
    return c;
}

double j_alpha_analytic(double alpha, const JAlphaConstants& c, double lambda, double u) {
    if (alpha == 1.0) return c.C0 * std::log(1.0 + c.C1 / (lambda + u / c.C1));
    if (alpha < 2.0) return c.C0 * std::pow(lambda + std::pow(u, alpha) / c.C1, 1.0 / alpha - 1.0);
    return c.C0 * shape_alpha2(c.C1, lambda, u);
}

SpectralResult j_alpha_bound(const SpectralJob& job) {
    SpectralResult r = j_alpha_value(job);
    const JAlphaConstants c = j_alpha_constants(job.alpha, job.delta);
    r.bound = j_alpha_analytic(job.alpha, c, job.lambda, job.u);
    r.regime_tag = job.alpha == 1.0 ? "log" : (job.alpha < 2.0 ? "power" : "sqrt-log");
    if (r.value > r.bound)
        throw Error(ErrorCode::BoundViolated, "J_alpha = " + std::to_string(r.value) + " exceeds bound " +
                                                  std::to_string(r.bound));
    return r;
}

}  // namespace lrex
