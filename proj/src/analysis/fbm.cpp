#include "lrex/analysis/fbm.hpp"

#include "lrex/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>

namespace lrex {

HurstTarget hurst_target(double alpha, int dim) {
    HurstTarget h;
    if (dim == 1) {
        if (alpha <= 1.0) {
            h.H = 0.5;
            h.branch = alpha < 1.0 ? "transient" : "alpha=1";
        } else if (alpha < 2.0) {
            h.H = (2.0 * alpha - 1.0) / (2.0 * alpha);  // 1 - 1/(2 alpha), correctly rounded at 3/2
            h.branch = "1<alpha<2";
        } else {
            h.H = 0.75;
            h.branch = "alpha>=2";
            h.degree2_one_time_only = true;
        }
    } else {
        h.H = 0.5;
        h.branch = alpha >= 2.0 ? "d=2,alpha>=2" : "d=2,transient";
    }
    return h;
}

double fbm_covariance(double s, double t, double H) {
    const double h2 = 2.0 * H;
    return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

namespace {

void check_times(const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1])))
            throw Error(ErrorCode::BadInterval, "times must be positive and increasing");
}

}  // namespace

PathSet synthetic_fbm(const std::vector<double>& times, double H, std::size_t n, std::mt19937_64& rng) {
    check_times(times);
    const auto m = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd c(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) c(i, j) = fbm_covariance(times[i], times[j], H);
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::IllConditioned, "fBm covariance is not positive definite");
    const Eigen::MatrixXd Lf = llt.matrixL();
    std::normal_distribution<double> g;
    PathSet p{times, std::vector<double>(n * times.size())};
    Eigen::VectorXd z(m);
    for (std::size_t r = 0; r < n; ++r) {
        for (Eigen::Index i = 0; i < m; ++i) z[i] = g(rng);
        const Eigen::VectorXd x = Lf * z;
        for (Eigen::Index i = 0; i < m; ++i) p.values[r * times.size() + i] = x[i];
    }
    return p;
}

PathSet synthetic_brownian(const std::vector<double>& times, std::size_t n, std::mt19937_64& rng) {
    check_times(times);
    std::normal_distribution<double> g;
    PathSet p{times, std::vector<double>(n * times.size())};
    for (std::size_t r = 0; r < n; ++r) {
        double b = 0.0, prev = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            b += std::sqrt(times[i] - prev) * g(rng);
            prev = times[i];
            p.values[r * times.size() + i] = b;
        }
    }
    return p;
}

FbmTest fbm_covariance_test(const PathSet& paths, double H) {
    const std::size_t m = paths.times.size(), n = paths.n();
    if (m < 4) throw Error(ErrorCode::BadInterval, "need at least 4 grid times");
    check_times(paths.times);
    if (n < 1000) throw Error(ErrorCode::TooFewReplicas, "need at least 1000 replicas, got " + std::to_string(n));

    FbmTest out;
    out.H = H;
    out.times = paths.times;
    out.n_replicas = n;
    for (std::size_t i = 1; i < m; ++i)
        if (std::abs(std::log(paths.times[i])) < std::abs(std::log(paths.times[out.ref_index]))) out.ref_index = i;
    const std::size_t r0 = out.ref_index;

    std::vector<double> mean(m, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t i = 0; i < m; ++i) mean[i] += paths.at(r, i);
    for (double& v : mean) v /= static_cast<double>(n);
    auto prod = [&](std::size_t r, std::size_t i, std::size_t j) {
        return (paths.at(r, i) - mean[i]) * (paths.at(r, j) - mean[j]);
    };
    std::vector<double> cov(m * m, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) cov[i * m + j] += prod(r, i, j);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) cov[j * m + i] = cov[i * m + j] /= static_cast<double>(n);
    const double crr = cov[r0 * m + r0];
    if (!(crr > 0.0)) throw Error(ErrorCode::NonPositiveData, "zero variance at the reference time");
    const double target_ref = std::pow(paths.times[r0], 2.0 * H);
    const double scale = target_ref / crr;

    out.empirical.assign(m * m, 0.0);
    out.theory.assign(m * m, 0.0);
    out.z.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            const double cij = cov[i * m + j];
            double s1 = 0.0, s2 = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                // Influence function of cij / crr.
                const double psi = (prod(r, i, j) - cij) / crr - cij * (prod(r, r0, r0) - crr) / (crr * crr);
                s1 += psi;
                s2 += psi * psi;
            }
            const double var = std::max(0.0, s2 / n - (s1 / n) * (s1 / n));
            const double se = target_ref * std::sqrt(var / static_cast<double>(n));
            const double emp = cij * scale, th = fbm_covariance(paths.times[i], paths.times[j], H);
            // The reference variance is fixed by the normalization.
            const double z = (i == r0 && j == r0) || !(se > 0.0) ? 0.0 : (emp - th) / se;
            out.empirical[i * m + j] = out.empirical[j * m + i] = emp;
            out.theory[i * m + j] = out.theory[j * m + i] = th;
            out.z[i * m + j] = out.z[j * m + i] = z;
            out.max_abs_z = std::max(out.max_abs_z, std::abs(z));
            if (i != j) out.max_abs_z_offdiag = std::max(out.max_abs_z_offdiag, std::abs(z));
        }
    const Eigen::Map<const Eigen::MatrixXd> e(out.empirical.data(), static_cast<Eigen::Index>(m),
                                              static_cast<Eigen::Index>(m));
    out.min_eigen_empirical = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(e, Eigen::EigenvaluesOnly).eigenvalues()[0];
    return out;
}

std::string fbm_csv(const FbmTest& t) {
    std::string out = "s,t,empirical,theory,z\n";
    char buf[256];
    const std::size_t m = t.times.size();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", t.times[i], t.times[j],
                          t.empirical[i * m + j], t.theory[i * m + j], t.z[i * m + j]);
            out += buf;
        }
    return out;
}

}  // namespace lrex
