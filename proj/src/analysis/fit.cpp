#include "lrex/analysis/fit.hpp"

#include "lrex/error.hpp"

#include <cmath>
#include <cstdio>

namespace lrex {

const char* to_string(Correction c) {
    switch (c) {
        case Correction::None: return "none";
        case Correction::Log: return "log";
        case Correction::SqrtLog: return "sqrt_log";
        case Correction::LogLog: return "loglog";
    }
    return "none";
}

Correction parse_correction(const std::string& s) {
    for (Correction c : {Correction::None, Correction::Log, Correction::SqrtLog, Correction::LogLog})
        if (s == to_string(c)) return c;
    throw Error(ErrorCode::ParseError, "unknown correction model '" + s + "'");
}

namespace {

double log_correction(Correction c, double x) {
    const double l = std::abs(std::log(x));
    switch (c) {
        case Correction::None: return 0.0;
        case Correction::Log:
            if (l == 0.0) break;
            return std::log(l);
        case Correction::SqrtLog:
            if (l == 0.0) break;
            return -0.5 * std::log(l);
        case Correction::LogLog:
            if (l <= 1.0) break;
            return std::log(std::log(l));
    }
    throw Error(ErrorCode::BadInterval, std::string("correction '") + to_string(c) + "' undefined at x = " +
                                            std::to_string(x));
}

struct Prepared {
    std::vector<double> lx, ly, w;  // ly relative to y[0]
    double log_ref = 0.0;
    bool weighted = false;
};

struct Solved {
    double beta, intercept, se, chi2_dof, runs_z;
    std::vector<double> residuals;
    bool white;
};

double runs_statistic(const std::vector<double>& r) {
    double scale = 0.0;
    for (double v : r) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    int n1 = 0, n2 = 0, runs = 0, last = 0;
    for (double v : r) {
        if (std::abs(v) <= 1e-12 * scale) continue;
        const int s = v > 0.0 ? 1 : -1;
        (s > 0 ? n1 : n2)++;
        if (s != last) ++runs;
        last = s;
    }
    const double n = n1 + n2;
    if (n1 == 0 || n2 == 0) return n < 2 ? 0.0 : -std::sqrt(n);
    const double mu = 2.0 * n1 * n2 / n + 1.0;
    const double var = (mu - 1.0) * (mu - 2.0) / (n - 1.0);
    return var > 0.0 ? (runs - mu) / std::sqrt(var) : 0.0;
}

Solved solve(const Prepared& p, std::size_t a, std::size_t b) {
    const std::size_t n = b - a;
    double sw = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t i = a; i < b; ++i) {
        sw += p.w[i];
        mx += p.w[i] * p.lx[i];
        my += p.w[i] * p.ly[i];
    }
    mx /= sw;
    my /= sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = a; i < b; ++i) {
        sxx += p.w[i] * (p.lx[i] - mx) * (p.lx[i] - mx);
        sxy += p.w[i] * (p.lx[i] - mx) * (p.ly[i] - my);
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientPoints, "fit window has no spread in x");
    Solved s;
    s.beta = sxy / sxx;
    s.intercept = my - s.beta * mx;
    double rss = 0.0;
    for (std::size_t i = a; i < b; ++i) {
        const double r = p.ly[i] - s.intercept - s.beta * p.lx[i];
        rss += p.w[i] * r * r;
        s.residuals.push_back(p.weighted ? r * std::sqrt(p.w[i]) : r);
    }
    const double dof = static_cast<double>(n) - 2.0;
    s.chi2_dof = rss / dof;
    s.se = p.weighted ? std::sqrt(std::max(1.0, s.chi2_dof) / sxx) : std::sqrt(s.chi2_dof / sxx);
    s.runs_z = runs_statistic(s.residuals);
    s.white = std::abs(s.runs_z) < 2.0 && (!p.weighted || s.chi2_dof <= 1.0 + 3.0 * std::sqrt(2.0 / dof));
    return s;
}

}  // namespace

ScalingFit fit_exponent(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& y_err,
                        const FitOptions& opt) {
    if (x.size() != y.size() || (!y_err.empty() && y_err.size() != y.size()))
        throw Error(ErrorCode::BadInterval, "x, y and y_err sizes differ");
    if (opt.min_points < 3) throw Error(ErrorCode::InsufficientPoints, "min_points must be at least 3");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= opt.x_lo && x[i] <= opt.x_hi)) continue;
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw Error(ErrorCode::NonPositiveData, "x and y must be positive for a log-log fit");
        if (!idx.empty() && !(x[i] > x[idx.back()])) throw Error(ErrorCode::BadInterval, "x must be increasing");
        idx.push_back(i);
    }
    if (idx.size() < opt.min_points)
        throw Error(ErrorCode::InsufficientPoints,
                    std::to_string(idx.size()) + " points in window, need " + std::to_string(opt.min_points));

    bool weighted = false;
    for (std::size_t i : idx)
        if (!y_err.empty() && y_err[i] > 0.0) weighted = true;
    Prepared p;
    p.weighted = weighted;
    const double y_ref = y[idx.front()];
    p.log_ref = std::log(y_ref);
    for (std::size_t i : idx) {
        p.lx.push_back(std::log(x[i]));
        p.ly.push_back(std::log(y[i] / y_ref) - log_correction(opt.correction, x[i]));
        if (weighted) {
            if (!(y_err[i] > 0.0)) throw Error(ErrorCode::NonPositiveData, "y_err must be positive when given");
            const double s = y_err[i] / y[i];
            p.w.push_back(1.0 / (s * s));
        } else {
            p.w.push_back(1.0);
        }
    }

    const std::size_t n = idx.size();
    std::size_t best_a = 0, best_b = n;
    Solved best = solve(p, 0, n);
    if (opt.auto_window && !best.white) {
        double best_span = -1.0;
        for (std::size_t a = 0; a + opt.min_points <= n; ++a)
            for (std::size_t b = a + opt.min_points; b <= n; ++b) {
                const double span = p.lx[b - 1] - p.lx[a];
                if (span <= best_span) continue;
                Solved s = solve(p, a, b);
                if (!s.white) continue;
                best_span = span;
                best_a = a;
                best_b = b;
                best = std::move(s);
            }
        if (best_span < 0.0) best = solve(p, 0, n);  // nothing white: keep every point
    }

    ScalingFit f;
    for (std::size_t k = best_a; k < best_b; ++k) {
        f.x.push_back(x[idx[k]]);
        f.y.push_back(y[idx[k]]);
        if (!y_err.empty()) f.y_err.push_back(y_err[idx[k]]);
    }
    f.beta = best.beta;
    f.beta_se = best.se;
    f.intercept = best.intercept + p.log_ref;
    f.window_lo = f.x.front();
    f.window_hi = f.x.back();
    f.correction = opt.correction;
    f.residuals = std::move(best.residuals);
    f.chi2_dof = best.chi2_dof;
    f.runs_z = best.runs_z;
    f.white = best.white;
    return f;
}

bool FitReportRow::pass() const { return std::abs(fit.beta - target_beta) <= tolerance; }

std::string fit_report_csv(const std::vector<FitReportRow>& rows) {
    std::string out = "quantity,alpha,dim,rho,beta_hat,beta_se,window_lo,window_hi,target_beta,pass\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.quantity.c_str(),
                      r.alpha, r.dim, r.rho, r.fit.beta, r.fit.beta_se, r.fit.window_lo, r.fit.window_hi,
                      r.target_beta, r.pass() ? 1 : 0);
        out += buf;
    }
    return out;
}

}  // namespace lrex
