#include "lrex/analysis/tauberian.hpp"

#include "lrex/error.hpp"
#include "lrex/kernel/special.hpp"

#include <boost/math/interpolators/makima.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <cstdio>
#include <limits>

namespace lrex {

namespace {

constexpr double kEndFraction = 1e-2;  // largest share of the integral left to the end extensions

}  // namespace

TauberianReport tauberian_check(const Curve& variance, const Curve& laplace) {
    const std::size_t n = variance.x.size();
    if (variance.y.size() != n || laplace.x.size() != laplace.y.size())
        throw Error(ErrorCode::GridMismatch, "curve x and y sizes differ");
    if (n < 4) throw Error(ErrorCode::InsufficientPoints, "variance curve needs at least 4 points");
    std::vector<double> u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(variance.x[i] > 0.0) || !(variance.y[i] > 0.0))
            throw Error(ErrorCode::NonPositiveData, "variance curve must be positive");
        if (i > 0 && !(variance.x[i] > variance.x[i - 1]))
            throw Error(ErrorCode::GridMismatch, "t-grid must be increasing");
        u[i] = std::log(variance.x[i]);
        v[i] = std::log(variance.y[i]);
    }
    const double t0 = variance.x.front(), t1 = variance.x.back();
    const double p_head = (v[1] - v[0]) / (u[1] - u[0]);
    const double p_tail = (v[n - 1] - v[n - 2]) / (u[n - 1] - u[n - 2]);
    if (!(p_head > -1.0)) throw Error(ErrorCode::GridMismatch, "variance head is not integrable at t = 0");
    const double y0 = variance.y.front(), y1 = variance.y.back();
    const auto spline = boost::math::interpolators::makima(std::vector<double>(u), std::vector<double>(v));
    const auto& gl = special::gauss_legendre(16);

    TauberianReport rep;
    for (std::size_t l = 0; l < laplace.x.size(); ++l) {
        const double lam = laplace.x[l];
        if (!(lam > 0.0)) throw Error(ErrorCode::GridMismatch, "lambda must be positive");
        // int_0^t0 y0 (t/t0)^p e^{-lam t} dt and int_t1^inf y1 (t/t1)^q e^{-lam t} dt.
        const double head = y0 * std::pow(t0, -p_head) * std::pow(lam, -(p_head + 1.0)) *
                            boost::math::tgamma_lower(p_head + 1.0, lam * t0);
        const double tail = lam * t1 > 700.0 ? 0.0
                                             : y1 * std::pow(t1, -p_tail) * std::pow(lam, -(p_tail + 1.0)) *
                                                   boost::math::tgamma(p_tail + 1.0, lam * t1);
        double body = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double ta = variance.x[i], tb = variance.x[i + 1];
            if (lam * ta > 700.0) break;
            // Subpanels keep the exponential factor within e^2 per panel.
            const int k = 1 + static_cast<int>(lam * (tb - ta) / 2.0);
            const double h = (u[i + 1] - u[i]) / k;
            for (int s = 0; s < k; ++s) {
                const double a = u[i] + s * h;
                for (std::size_t q = 0; q < gl.x.size(); ++q) {
                    const double uu = a + 0.5 * h * (gl.x[q] + 1.0), t = std::exp(uu);
                    body += 0.5 * h * gl.w[q] * std::exp(spline(uu) - lam * t) * t;
                }
            }
        }
        const double total = head + body + tail;
        if (head > kEndFraction * total || tail > kEndFraction * total)
            throw Error(ErrorCode::GridMismatch, "t-grid does not cover lambda = " + std::to_string(lam));
        TauberianRow row;
        row.lambda = lam;
        row.laplace = laplace.y[l];
        row.from_variance = total;
        row.rel_dev = std::abs(total - row.laplace) / std::abs(row.laplace);
        const double t = 1.0 / lam;
        row.tauber_ratio = t >= t0 && t <= t1 ? lam * row.laplace / std::exp(spline(std::log(t)))
                                              : std::numeric_limits<double>::quiet_NaN();
        rep.max_rel_dev = std::max(rep.max_rel_dev, row.rel_dev);
        rep.rows.push_back(row);
    }
    return rep;
}

std::string tauberian_csv(const TauberianReport& r) {
    std::string out = "lambda,laplace,from_variance,rel_dev,tauber_ratio\n";
    char buf[256];
    for (const auto& row : r.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", row.lambda, row.laplace, row.from_variance,
                      row.rel_dev, row.tauber_ratio);
        out += buf;
    }
    return out;
}

}  // namespace lrex
