#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lrex/analysis/fit.hpp"
#include "lrex/error.hpp"
#include "lrex/kernel/fourier.hpp"
#include "lrex/oracle/exact.hpp"
#include "lrex/spectral/lower_bound.hpp"
#include "lrex/spectral/spectral.hpp"

#include <cmath>

using namespace lrex;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected lrex::Error");
    return ErrorCode::IoError;
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(std::pow(10.0, a + (b - a) * i / (n - 1)));
    return v;
}

double slope(const std::vector<double>& x, const std::vector<SpectralResult>& rows, Correction c = Correction::None) {
    std::vector<double> y;
    for (const auto& r : rows) y.push_back(r.value);
    FitOptions o;
    o.correction = c;
    o.auto_window = false;
    return fit_exponent(x, y, {}, o).beta;
}

SpectralJob job(int dim, double alpha, Target t) {
    SpectralJob j;
    j.dim = dim;
    j.alpha = alpha;
    j.target = t;
    return j;
}

SpectralJob la_job(double alpha) {
    SpectralJob j = job(1, alpha, Target::ILowerBound);
    j.variant = Variant::LA;
    j.b_plus = {2.0};
    j.b_minus = {1.0};
    return j;
}

// Plain trapezoid over a uniform grid on [0, 1): spectrally accurate for smooth
// periodic integrands, used as an independent check away from the singular regime.
template <class F>
double trapezoid_1d(F&& f, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += f((i + 0.5) / n);
    return s / n;
}

}  // namespace

TEST_CASE("job validation") {
    auto j = job(1, 1.5, Target::VarianceT);
    j.rel_tol = 1e-2;
    CHECK(code_of([&] { validate(j); }) == ErrorCode::BadInterval);
    j = job(1, 1.5, Target::VarianceT);
    j.singular_pad = 0.1;
    CHECK(code_of([&] { validate(j); }) == ErrorCode::BadInterval);
    j = job(1, 1.5, Target::VarianceT);
    j.t = 0.0;
    CHECK(code_of([&] { variance_sym(j); }) == ErrorCode::BadInterval);
    j = job(2, 1.5, Target::JAlphaBound);
    CHECK(code_of([&] { validate(j); }) == ErrorCode::BadSize);
    j = job(1, 1.5, Target::JAlphaBound);
    j.u = 0.06;
    CHECK(code_of([&] { validate(j); }) == ErrorCode::BadInterval);
    CHECK(parse_target(to_string(Target::GreenUt)) == Target::GreenUt);
}

TEST_CASE("short-time variance") {
    // g(x) = (x - 1 + e^{-x}) / x^2 -> 1/2, so value / t^2 -> 2 chi (1/2) = chi.
    for (int d : {1, 2}) {
        auto j = job(d, 1.5, Target::VarianceT);
        j.t = 1e-5;
        CHECK(variance_sym(j).value / (j.t * j.t) == doctest::Approx(0.25).epsilon(1e-5));
    }
}

TEST_CASE("variance against a uniform-grid oracle at moderate t") {
    // t = 1: the integrand is smooth enough for a fine midpoint rule.
    FourierSymbolParams p;
    p.alpha = 1.5;
    const double t = 1.0;
    const double ref = 2.0 * 0.25 * trapezoid_1d(
                                        [&](double u) {
                                            const double th = theta_fast(p, {u, 0.0});
                                            const double x = th * t;
                                            return x < 1e-8 ? 0.5 * t * t : t * t * (x - 1 + std::exp(-x)) / (x * x);
                                        },
                                        200000);
    auto j = job(1, 1.5, Target::VarianceT);
    j.t = t;
    CHECK(variance_sym(j).value == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("symmetric growth exponents") {
    const auto ts = logspace(2.0, 6.0, 13);
    CHECK(slope(ts, variance_sym_curve(job(1, 1.5, Target::VarianceT), ts)) == doctest::Approx(4.0 / 3.0).epsilon(0.015));

    // alpha = 2: value sqrt(log t) / t^{3/2} flattens within 5% over 10^{4..8}.
    const auto tl = logspace(4.0, 8.0, 5);
    const auto v = variance_sym_curve(job(1, 2.0, Target::VarianceT), tl);
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < tl.size(); ++i) {
        const double r = v[i].value * std::sqrt(std::log(tl[i])) / std::pow(tl[i], 1.5);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(hi / lo - 1.0 < 0.05);
}

TEST_CASE("occupation integral regimes") {
    // d = 2, alpha = 1.5: value / t settles. The approach is ~ t^{-0.35}; the t = 1e3
    // point is still ~4% below the limit, so the 3% band is asserted from 1e4 on.
    {
        const auto ts = logspace(3.0, 6.0, 4);
        const auto v = id_alpha_t_curve(job(2, 1.5, Target::IdAlphaT), ts);
        std::vector<double> r;
        for (std::size_t i = 0; i < ts.size(); ++i) r.push_back(v[i].value / ts[i]);
        // Aitken extrapolation of the last three ratios.
        const double d1 = r[2] - r[1], d2 = r[3] - r[2];
        const double limit = r[3] + d2 * d2 / (d1 - d2);
        for (std::size_t i = 1; i < r.size(); ++i) CHECK(std::abs(r[i] / limit - 1.0) < 0.03);
        for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
        CHECK(v[0].regime_tag == "t");
    }
    // d = 1, alpha = 1: value / (t log t) has a 1/log t correction; decade-to-decade
    // changes stay under 5% from 1e3 on and keep shrinking.
    {
        const auto ts = logspace(3.0, 8.0, 6);
        const auto v = id_alpha_t_curve(job(1, 1.0, Target::IdAlphaT), ts);
        double prev_change = 1.0;
        for (std::size_t i = 1; i < ts.size(); ++i) {
            const double a = v[i - 1].value / (ts[i - 1] * std::log(ts[i - 1]));
            const double b = v[i].value / (ts[i] * std::log(ts[i]));
            const double change = std::abs(b / a - 1.0);
            CHECK(change < 0.05);
            CHECK(change < prev_change);
            prev_change = change;
        }
        CHECK(v[0].regime_tag == "t log t");
    }
    // d = 2, alpha = 2: value / (t log log t) bounded and slowly varying.
    {
        const auto ts = logspace(4.0, 8.0, 5);
        const auto v = id_alpha_t_curve(job(2, 2.0, Target::IdAlphaT), ts);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double r = v[i].value / (ts[i] * std::log(std::log(ts[i])));
            CHECK(r > 0.5);
            CHECK(r < 1.0);
            if (i > 0) CHECK(std::abs(r / (v[i - 1].value / (ts[i - 1] * std::log(std::log(ts[i - 1])))) - 1.0) < 0.05);
        }
        CHECK(v[0].regime_tag == "t log log t");
    }
}

TEST_CASE("Laplace transform of the variance") {
    auto j = job(1, 1.5, Target::LaplaceLambda);
    j.lambda = 1e5;
    const double l3 = j.lambda * j.lambda * j.lambda;
    CHECK(laplace_sym(j).value * l3 / (2.0 * 0.25) == doctest::Approx(1.0).epsilon(1e-4));

    const auto ls = logspace(-6.0, -3.0, 13);
    CHECK(slope(ls, laplace_sym_curve(job(1, 1.25, Target::LaplaceLambda), ls)) ==
          doctest::Approx(1.0 / 1.25 - 3.0).epsilon(0.05 / 2.2));

    j.lambda = 1e-2;
    const auto r = laplace_sym(j, true);
    CHECK(r.companion == doctest::Approx(r.value).epsilon(0.01));

    // Strictly decreasing in lambda.
    const auto curve = laplace_sym_curve(job(2, 1.5, Target::LaplaceLambda), logspace(-4.0, 2.0, 13));
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].value < curve[i - 1].value);
    // Variance strictly increasing in t.
    const auto var = variance_sym_curve(job(2, 1.5, Target::VarianceT), logspace(-2.0, 6.0, 17));
    for (std::size_t i = 1; i < var.size(); ++i) CHECK(var[i].value > var[i - 1].value);
}

TEST_CASE("no NaN near the zero of theta") {
    for (int d : {1, 2})
        for (double a : {0.5, 1.0, 2.0, 3.0}) {
            const ThetaMesh m(job(d, a, Target::VarianceT), 1e12);
            for (double t : {1e-8, 1.0, 1e6, 1e12}) {
                const auto r = m.id_alpha(t);
                CHECK(std::isfinite(r.value));
                CHECK(r.value > 0.0);
            }
            CHECK(std::isfinite(m.resolvent(1e-12).value));
        }
}

TEST_CASE("mesh refinement moves values by less than rel_tol") {
    for (int d : {1, 2}) {
        auto base = job(d, 1.5, Target::VarianceT);
        base.t = 1e4;
        auto fine = base;
        fine.singular_pad = base.singular_pad / 2;
        fine.order = 2 * base.order;
        CHECK(std::abs(variance_sym(fine).value / variance_sym(base).value - 1.0) < base.rel_tol);
        auto lb = job(d, 1.5, Target::LaplaceLambda);
        lb.lambda = 1e-4;
        auto lf = lb;
        lf.singular_pad = lb.singular_pad / 2;
        lf.order = 2 * lb.order;
        CHECK(std::abs(laplace_sym(lf).value / laplace_sym(lb).value - 1.0) < lb.rel_tol);
    }
}

TEST_CASE("symmetric lower-bound integral is the Laplace integrand") {
    for (int d : {1, 2})
        for (double lam : {1e-4, 1e-1}) {
            auto j = job(d, 1.5, Target::ILowerBound);
            j.lambda = lam;
            j.b_plus.assign(d, 1.0);
            j.b_minus.assign(d, 1.0);
            auto lj = j;
            lj.target = Target::LaplaceLambda;
            const double integrand = laplace_sym(lj).value * lam * lam / (2.0 * 0.25);
            CHECK(i_lower_bound(j).value == doctest::Approx(integrand).epsilon(j.rel_tol));
        }
}

TEST_CASE("asymmetric lower-bound exponents in d = 1") {
    const auto ls = logspace(-6.0, -3.0, 7);
    CHECK(slope(ls, i_lower_bound_curve(la_job(1.25), ls)) == doctest::Approx(-0.2).epsilon(0.05 / 0.2));
    // I_1 >~ lambda^{-1/(2 alpha)}: a lower bound as lambda -> 0 caps the slope from above.
    const double b = slope(ls, i_lower_bound_curve(la_job(1.75), ls));
    CHECK(b <= -1.0 / 3.5 + 0.02);
    // The antisymmetric part only adds to F, so I_1 never exceeds the symmetric integrand.
    auto sym = job(1, 1.75, Target::LaplaceLambda);
    sym.lambda = 1e-4;
    auto la = la_job(1.75);
    la.lambda = 1e-4;
    CHECK(i_lower_bound(la).value <= laplace_sym(sym).value * 1e-8 / 0.5);
}

TEST_CASE("two-dimensional lower-bound integral") {
    auto j = job(2, 1.5, Target::ILowerBound);
    j.variant = Variant::LA;
    j.b_plus = {2.0, 1.0};
    j.b_minus = {1.0, 1.0};
    j.outer_grid = 16;
    j.lambda = 1e-2;
    const auto r = i_lower_bound(j);
    CHECK(std::isfinite(r.value));
    CHECK(r.value > 0.0);
    CHECK(r.err_est >= 0.0);
    auto s = job(2, 1.5, Target::LaplaceLambda);
    s.lambda = 1e-2;
    CHECK(r.value <= laplace_sym(s).value * 1e-4 / 0.5 * (1 + 1e-3));
}

TEST_CASE("J_alpha value and bound") {
    // lambda >> 1: integrand ~ 1/lambda.
    auto j = job(1, 1.5, Target::JAlphaBound);
    j.lambda = 1e6;
    const auto big = j_alpha_bound(j);
    CHECK(big.value == doctest::Approx(j.delta / j.lambda).epsilon(1e-5));
    CHECK(big.value < 1e-3 * big.bound);

    j.lambda = 1e-4;
    j.u = 1e-2;
    j.delta = 0.05;
    const auto mid = j_alpha_bound(j);
    CHECK(mid.value <= mid.bound);
    CHECK(mid.value > 0.0);

    // Direct midpoint oracle for the value.
    FourierSymbolParams p;
    p.alpha = 1.5;
    const int n = 400000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) * j.delta / n;
        s += 1.0 / (j.lambda + theta_fast(p, {x, 0.0}) + theta_fast(p, {x - j.u + 1.0, 0.0}));
    }
    CHECK(mid.value == doctest::Approx(s * j.delta / n).epsilon(1e-4));

    // alpha = 1: value / log(1/(lambda + u)) stays under the fitted C0.
    auto one = job(1, 1.0, Target::JAlphaBound);
    one.lambda = 1e-4;
    one.u = 1e-2;
    const auto r1 = j_alpha_bound(one);
    const auto c1 = j_alpha_constants(1.0, one.delta);
    CHECK(r1.value / std::log(1.0 / (one.lambda + one.u)) <= c1.C0);

    // alpha = 2 over the grid its constant was fitted on, and past it.
    for (double lam : {1e-3, 1e-6, 1e-9})
        for (double u : {1e-2, 1e-4}) {
            auto two = job(1, 2.0, Target::JAlphaBound);
            two.lambda = lam;
            two.u = u;
            const auto r2 = j_alpha_bound(two);
            CHECK(r2.value <= r2.bound);
        }
}

TEST_CASE("Green function") {
    auto j = job(1, 1.5, Target::GreenUt);
    j.t = 1e-6;
    CHECK(green_ut(j, {0, 0}).value / j.t == doctest::Approx(1.0).epsilon(1e-5));

    // sup_x u_t(x) = u_t(0) = O(t^{1 - 1/alpha}).
    j.t = 1e3;
    const double r3 = green_ut(j, {0, 0}).value / std::cbrt(1e3);
    j.t = 1e4;
    const double r4 = green_ut(j, {0, 0}).value / std::cbrt(1e4);
    CHECK(std::abs(r4 / r3 - 1.0) < 0.1);

    // u_t >= 0, maximal at the origin, and sum_x u_t(x) <= t; the window |x| <= 80
    // misses about 3.5% of the mass at t = 50.
    j.t = 50.0;
    const double u0 = green_ut(j, {0, 0}).value;
    double total = 0.0;
    for (int x = -80; x <= 80; ++x) {
        const double v = green_ut(j, {x, 0}).value;
        CHECK(v >= -1e-10);
        CHECK(v <= u0 + 1e-12);
        total += v;
    }
    CHECK(total <= j.t);
    CHECK(total > 0.9 * j.t);

    // sum_x u_t(x)^2 grows like t^{2 - 1/alpha}.
    std::vector<SpectralResult> sq;
    const auto ts = logspace(3.0, 5.0, 5);
    for (double t : ts) {
        j.t = t;
        sq.push_back(green_sq_sum(j));
    }
    CHECK(slope(ts, sq) == doctest::Approx(4.0 / 3.0).epsilon(0.05 / (4.0 / 3.0)));
}

TEST_CASE("torus analog reproduces the exact resolvent") {
    // On the ring the Fourier modes k/L diagonalize the one-particle problem; for
    // degree-one f the full resolvent form collapses onto it under SYM.
    const auto k = build_kernel(1, 1.5, {1.0}, {1.0}, Variant::SYM, 5);
    const auto s = build_exact(k, 10, 0.5);
    for (double lam : {0.05, 0.5, 3.0})
        CHECK(laplace_torus(k, 10, 0.5, lam) == doctest::Approx(exact_resolvent(s, lam)).epsilon(1e-10));
}

TEST_CASE("results CSV") {
    auto j = job(1, 1.5, Target::LaplaceLambda);
    j.lambda = 0.5;
    const std::string csv = results_csv(j, {laplace_sym(j)});
    CHECK(csv.rfind("target,dim,alpha,rho,t_or_lambda,value,err_est,regime_tag\n", 0) == 0);
    CHECK(csv.find("LaplaceLambda,1,1.5,0.5,0.5,") != std::string::npos);
    CHECK(regime_tag(1, 1.5) == "t^{2-1/alpha}");
    CHECK(regime_tag(1, 3.0) == "t^{3/2}");
}
