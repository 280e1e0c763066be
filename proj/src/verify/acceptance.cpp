#include "lrex/verify/acceptance.hpp"

#include "lrex/analysis/fbm.hpp"
#include "lrex/analysis/fit.hpp"
#include "lrex/analysis/tauberian.hpp"
#include "lrex/error.hpp"
#include "lrex/kernel/fourier.hpp"
#include "lrex/oracle/exact.hpp"
#include "lrex/sim/occupation.hpp"
#include "lrex/spectral/lower_bound.hpp"
#include "lrex/spectral/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

namespace lrex {

namespace {

struct Check {
    bool ok = true;
    std::vector<std::string> lines;

    void add(bool pass, const char* fmt, auto... args) {
        char buf[512];
        std::snprintf(buf, sizeof buf, fmt, args...);
        lines.push_back(std::string(pass ? "ok   " : "FAIL ") + buf);
        ok = ok && pass;
    }
    void close(double value, double target, double tol, const char* what) {
        add(std::abs(value - target) <= tol, "%s: %.6g (target %.6g +- %.3g)", what, value, target, tol);
    }
    void below(double value, double limit, const char* what) {
        add(value < limit, "%s: %.3g (limit %.3g)", what, value, limit);
    }
};

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(std::pow(10.0, a + (b - a) * i / (n - 1)));
    return v;
}

int threads_of(const AcceptanceOptions& o) {
    return o.threads > 0 ? o.threads : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

double fitted_slope(const std::vector<double>& x, const std::vector<SpectralResult>& rows, Correction c) {
    std::vector<double> y;
    for (const auto& r : rows) y.push_back(r.value);
    FitOptions o;
    o.correction = c;
    o.auto_window = false;
    return fit_exponent(x, y, {}, o).beta;
}

// theta_1(u) / F_alpha(u) at u = 2^-14 against the asymptote constant J.
void theta_asymptote_check(Check& ck, const AcceptanceOptions&) {
    for (double a : {0.5, 1.5, 3.0}) {
        FourierSymbolParams p;
        p.dim = 1;
        p.alpha = a;
        const double J = theta_asymptote(p).J;
        double prev = INFINITY;
        bool monotone = true;
        double last = 0.0;
        for (int k = 6; k <= 14; ++k) {
            const double u = std::ldexp(1.0, -k);
            const double dev = std::abs(theta_fast(p, {u, 0.0}) / f_alpha(a, u) / J - 1.0);
            monotone = monotone && dev <= prev * 1.0000001 + 1e-12;
            prev = dev;
            last = dev;
        }
        char what[64];
        std::snprintf(what, sizeof what, "alpha=%g |ratio/J - 1| at k=14", a);
        ck.below(last, 0.02, what);
        ck.add(true, "alpha=%g deviation shrinks with k: %s (J = %.12g)", a, monotone ? "yes" : "no", J);
    }
}

void symmetric_exponents(Check& ck, const AcceptanceOptions&) {
    const std::vector<double> ts = logspace(2.0, 6.0, 17);
    struct Case {
        int dim;
        double alpha, target, tol;
        Correction c;
    };
    for (const Case& k : {Case{1, 0.5, 1.0, 0.02, Correction::None}, Case{1, 1.5, 4.0 / 3.0, 0.02, Correction::None},
                          Case{1, 3.0, 1.5, 0.02, Correction::None}, Case{2, 1.5, 1.0, 0.02, Correction::None},
                          Case{1, 1.0, 1.0, 0.05, Correction::Log}, Case{1, 2.0, 1.5, 0.05, Correction::SqrtLog}}) {
        SpectralJob j;
        j.dim = k.dim;
        j.alpha = k.alpha;
        const double b = fitted_slope(ts, variance_sym_curve(j, ts), k.c);
        char what[96];
        std::snprintf(what, sizeof what, "d=%d alpha=%g slope (%s)", k.dim, k.alpha, to_string(k.c));
        ck.close(b, k.target, k.tol, what);
    }
}

void tauberian_identity(Check& ck, const AcceptanceOptions&) {
    const JumpKernel k = build_kernel(1, 1.5, {1.0}, {1.0}, Variant::SYM, 64);
    const ExactSystem s = build_exact(k, 8, 0.5);
    const std::vector<double> lambdas{0.1, 0.5, 2.0};
    Curve lap;
    for (double l : lambdas) {
        const double direct = exact_resolvent(s, l);
        const double td = exact_laplace_time_domain(s, l).value;
        char what[64];
        std::snprintf(what, sizeof what, "oracle lambda=%g resolvent vs time domain", l);
        ck.below(std::abs(td / direct - 1.0), 1e-4, what);
        lap.x.push_back(l);
        lap.y.push_back(direct);
    }
    const std::vector<double> ts = logspace(-3.0, 3.0, 241);
    Curve var{ts, {}};
    for (const auto& v : exact_variance_curve(s, ts)) var.y.push_back(v.value);
    ck.below(tauberian_check(var, lap).max_rel_dev, 1e-4, "oracle spline-extended Laplace vs resolvent");

    SpectralJob j;
    j.alpha = 1.5;
    j.target = Target::LaplaceLambda;
    j.lambda = 1e-2;
    const SpectralResult r = laplace_sym(j, true);
    ck.below(std::abs(r.companion / r.value - 1.0), 0.01, "spectral lambda=0.01 direct vs time domain");
    const std::vector<double> tt = logspace(-2.0, 4.0, 121);
    SpectralJob jv;
    jv.alpha = 1.5;
    Curve sv{tt, {}};
    for (const auto& v : variance_sym_curve(jv, tt)) sv.y.push_back(v.value);
    ck.below(tauberian_check(sv, Curve{{1e-2}, {r.value}}).max_rel_dev, 0.01,
             "spectral spline-extended Laplace vs direct");
}

void mc_vs_oracle(Check& ck, const AcceptanceOptions& o) {
    const std::vector<double> ts{1.0, 2.0, 5.0};
    struct Case {
        const char* name;
        Variant v;
        double bp, bm;
    };
    std::uint64_t seed = o.seed;
    for (const Case& c : {Case{"SYM", Variant::SYM, 1.0, 1.0}, Case{"LA", Variant::LA, 2.0, 1.0}}) {
        const JumpKernel k = build_kernel(1, 1.5, {c.bp}, {c.bm}, c.v, 64);
        const ExactSystem s = build_exact(k, 10, 0.5);
        const auto exact = exact_variance_curve(s, ts);
        OccupationOptions opt;
        opt.threads = threads_of(o);
        const ReplicaStats st = run_occupation(k, 10, 0.5, ts, 100000, FunctionalSpec{}, seed, opt);
        seed += 100000;
        for (std::size_t g = 0; g < ts.size(); ++g) {
            const Estimate v = st.var_gamma(g);
            const double z = (v.value - exact[g].value) / v.se;
            ck.add(std::abs(z) < 3.0, "%s t=%g MC %.6g +- %.2g vs oracle %.6g (z = %.2f, limit 3)", c.name, ts[g],
                   v.value, v.se, exact[g].value, z);
        }
    }
}

void second_class_identity(Check& ck, const AcceptanceOptions& o) {
    const std::vector<double> ss{0.5, 1.0, 2.0};
    std::uint64_t seed = o.seed;
    for (Variant v : {Variant::SYM, Variant::LA}) {
        const JumpKernel k = build_kernel(1, 1.5, {v == Variant::LA ? 2.0 : 1.0}, {1.0}, v, 1024);
        CouplingOptions opt;
        opt.threads = threads_of(o);
        const CouplingReport rep = covariance_identity_check(k, 256, 0.5, ss, 200000, seed, opt);
        seed += 1000000;
        for (const auto& row : rep.rows)
            ck.add(std::abs(row.z) < 3.0, "%s s=%g cov %.5g vs chi P %.5g (z = %.2f, limit 3)", to_string(v), row.s,
                   row.cov.value, row.chi_p0.value, row.z);
    }
}

void lower_bound_exponents(Check& ck, const AcceptanceOptions&) {
    const std::vector<double> ls = logspace(-6.0, -3.0, 13);
    for (double a : {1.25, 1.5}) {
        SpectralJob j;
        j.alpha = a;
        j.rho = 0.5;
        j.target = Target::ILowerBound;
        j.variant = Variant::LA;
        j.b_plus = {2.0};
        j.b_minus = {1.0};
        char what[64];
        std::snprintf(what, sizeof what, "LA alpha=%g slope of I_1", a);
        ck.close(fitted_slope(ls, i_lower_bound_curve(j, ls), Correction::None), 1.0 / a - 1.0, 0.05, what);
    }
}

void hurst_and_fbm(Check& ck, const AcceptanceOptions& o) {
    for (auto [a, H] : {std::pair{1.0, 0.5}, std::pair{1.5, 2.0 / 3.0}, std::pair{2.0, 0.75}}) {
        const double got = hurst_target(a, 1).H;
        ck.add(got == H, "hurst_target(alpha=%g, d=1) = %.17g (expected %.17g exactly)", a, got, H);
    }
    std::mt19937_64 rng(o.seed);
    const std::vector<double> times{0.25, 0.5, 0.75, 1.0};
    for (double H : {0.5, 2.0 / 3.0, 0.75}) {
        const FbmTest t = fbm_covariance_test(synthetic_fbm(times, H, 1000, rng), H);
        char what[64];
        std::snprintf(what, sizeof what, "synthetic fBm H=%.4g max |z|", H);
        ck.below(t.max_abs_z, 3.0, what);
    }
    // Occupation time of eta(0) - rho, alpha = 1.5 SYM, N = 200, L = 512.
    const double N = 200.0;
    const JumpKernel k = build_kernel(1, 1.5, {1.0}, {1.0}, Variant::SYM, 1024);
    std::vector<double> grid;
    for (double s : times) grid.push_back(N * s);
    OccupationOptions opt;
    opt.threads = threads_of(o);
    const ReplicaStats st = run_occupation(k, 512, 0.5, grid, 4000, FunctionalSpec{}, o.seed + 7, opt);
    PathSet p{times, st.gamma};
    const FbmTest t = fbm_covariance_test(p, hurst_target(1.5, 1).H);
    ck.below(t.max_abs_z_offdiag, 4.0, "simulated alpha=1.5 N=200 off-diagonal max |z| (finite N)");
}

void invariants(Check& ck, const AcceptanceOptions& o) {
    const JumpKernel la = build_kernel(1, 1.5, {2.0}, {1.0}, Variant::LA, 1024);
    {
        Rng rng(o.seed);
        LatticeConfig c = init_bernoulli(64, 1, 0.5, rng);
        const std::size_t n0 = c.particles.size();
        bool ok = true;
        for (int i = 0; i < 100000; ++i) {
            step(c, la, rng);
            if (i % 1000 == 0) ok = ok && c.consistent() && c.particles.size() == n0;
        }
        ck.add(ok && c.consistent() && c.particles.size() == n0, "particle count %zu preserved over 1e5 attempts", n0);
    }
    {
        OccupationOptions opt;
        opt.threads = threads_of(o);
        const std::vector<double> ts{1.0, 5.0, 20.0};
        const ReplicaStats st = run_occupation(la, 64, 0.3, ts, 40000, FunctionalSpec{FunctionalSpec::Kind::Degree1, 0, 1, 0.3}, o.seed + 1, opt);
        for (std::size_t g = 0; g < ts.size(); ++g) {
            const Estimate d = st.mean_density(g);
            const double z = (d.value - 0.3) / d.se;
            ck.add(std::abs(z) < 3.0, "stationarity t=%g: E eta_t(0) = %.5f +- %.2g vs 0.3 (z = %.2f)", ts[g], d.value,
                   d.se, z);
        }
    }
    {
        CouplingOptions opt;
        opt.threads = threads_of(o);
        for (const auto& row : coupled_marginal_check(la, 64, 0.5, {0.5, 1.0, 2.0}, 100000, o.seed + 2, opt)) {
            ck.add(std::abs(row.z_upper) < 3.0 && std::abs(row.z_lower) < 3.0,
                   "coupled marginals s=%g: upper z = %.2f, lower z = %.2f (limit 3)", row.s, row.z_upper,
                   row.z_lower);
        }
    }
    {
        const ExactSystem s = build_exact(la, 10, 0.5);
        double worst = 0.0;
        for (int r = 0; r < s.Q.outerSize(); ++r) {
            double acc = 0.0;
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(s.Q, r); it; ++it) acc += it.value();
            worst = std::max(worst, std::abs(acc));
        }
        ck.below(worst, 1e-12, "LA L=10 generator max |row sum|");
        ck.below(stationarity_residual(s), 1e-12, "LA L=10 max |pi Q|");
    }
    const ExactSystem sym = build_exact(build_kernel(1, 1.5, {1.0}, {1.0}, Variant::SYM, 1024), 10, 0.5);
    ck.below(reversibility_defect(sym), 1e-12, "SYM L=10 max |pi_i Q_ij - pi_j Q_ji|");
    ck.below(stationarity_residual(sym), 1e-12, "SYM L=10 max |pi Q|");
}

struct Spec {
    const char* name;
    double budget;
    void (*fn)(Check&, const AcceptanceOptions&);
};

const Spec kCriteria[8] = {
    {"theta-asymptote", 60.0, theta_asymptote_check},
    {"symmetric-variance-exponents", 300.0, symmetric_exponents},
    {"tauberian-identity", 120.0, tauberian_identity},
    {"mc-vs-oracle", 600.0, mc_vs_oracle},
    {"second-class-identity", 600.0, second_class_identity},
    {"asymmetric-lower-bound-exponents", 600.0, lower_bound_exponents},
    {"hurst-map-and-fbm", 600.0, hurst_and_fbm},
    {"invariants", 300.0, invariants},
};

}  // namespace

const char* criterion_name(int id) {
    if (id < 1 || id > 8) throw Error(ErrorCode::BadInterval, "criterion ids run from 1 to 8");
    return kCriteria[id - 1].name;
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
    criterion_name(id);
    const Spec& spec = kCriteria[id - 1];
    CriterionResult r;
    r.id = id;
    r.name = spec.name;
    r.budget_seconds = spec.budget;
    AcceptanceOptions o = opt;
    o.seed = opt.seed + 1000003ULL * static_cast<std::uint64_t>(id);
    const auto t0 = std::chrono::steady_clock::now();
    Check ck;
    try {
        spec.fn(ck, o);
    } catch (const std::exception& e) {
        ck.add(false, "error: %s", e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.checks_pass = ck.ok;
    r.lines = std::move(ck.lines);
    return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
    std::vector<int> ids = opt.only;
    if (ids.empty())
        for (int i = 1; i <= 8; ++i) ids.push_back(i);
    std::vector<CriterionResult> out;
    for (int id : ids) {
        out.push_back(run_criterion(id, opt));
        if (opt.on_result) opt.on_result(out.back());
    }
    return out;
}

std::string summary_line(const CriterionResult& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s  %d %-34s %8.1f s / %.0f s%s", r.pass() ? "PASS" : "FAIL", r.id, r.name.c_str(),
                  r.seconds, r.budget_seconds, r.checks_pass && !r.pass() ? "  (over budget)" : "");
    return buf;
}

std::string acceptance_csv(const std::vector<CriterionResult>& rows) {
    std::string out = "id,criterion,pass,seconds,budget_seconds\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%s,%d,%.3f,%.0f\n", r.id, r.name.c_str(), r.pass() ? 1 : 0, r.seconds,
                      r.budget_seconds);
        out += buf;
    }
    return out;
}

}  // namespace lrex
