#include "lrex/oracle/exact.hpp"

#include "lrex/error.hpp"
#include "lrex/kernel/special.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>

namespace lrex {

std::vector<double> ring_rates(const JumpKernel& k, int L) {
    std::vector<double> rate(static_cast<std::size_t>(L), 0.0);
    const auto& disp = k.displacements();
    const auto& prob = k.probabilities();
    for (std::size_t i = 0; i < disp.size(); ++i) rate[static_cast<std::size_t>(((disp[i][0] % L) + L) % L)] += prob[i];
    rate[0] = 0.0;  // y = 0 mod L moves nothing
    return rate;
}

ExactSystem build_exact(const JumpKernel& k, int L, double rho, const FunctionalSpec& f) {
    if (k.dim() != 1) throw Error(ErrorCode::BadSize, "exact oracle is one-dimensional");
    if (L > 12) throw Error(ErrorCode::StateSpaceTooLarge, "L must be at most 12");
    if (L < 2) throw Error(ErrorCode::BadSize, "L must be at least 2");
    if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorCode::BadDensity, "rho must lie in (0, 1)");
    if (f.x0 < 0 || f.x0 >= L || f.x1 < 0 || f.x1 >= L) throw Error(ErrorCode::BadSize, "observable site outside ring");

    ExactSystem s;
    s.L = L;
    s.rho = rho;
    s.alpha = k.alpha();
    s.variant = k.variant();
    const int n = 1 << L;
    const std::vector<double> rate = ring_rates(k, L);

    std::vector<Eigen::Triplet<double>> trip;
    s.f.resize(n);
    s.pi.resize(n);
    for (int state = 0; state < n; ++state) {
        int occupied = __builtin_popcount(static_cast<unsigned>(state));
        s.pi[state] = std::pow(rho, occupied) * std::pow(1.0 - rho, L - occupied);
        auto bit = [state](int x) { return (state >> x) & 1; };
        double v = bit(f.x0) - rho;
        s.f[state] = f.kind == FunctionalSpec::Kind::Degree1 ? v : v * (bit(f.x1) - rho);
        double exit = 0.0;
        for (int x = 0; x < L; ++x) {
            if (!bit(x)) continue;
            for (int z = 1; z < L; ++z) {
                int target = (x + z) % L;
                if (bit(target) || rate[z] == 0.0) continue;
                int next = state ^ (1 << x) ^ (1 << target);
                trip.emplace_back(state, next, rate[z]);
                exit += rate[z];
            }
        }
        trip.emplace_back(state, state, -exit);
        s.max_exit_rate = std::max(s.max_exit_rate, exit);
    }
    s.Q.resize(n, n);
    s.Q.setFromTriplets(trip.begin(), trip.end());
    return s;
}

double stationarity_residual(const ExactSystem& s) {
    Eigen::VectorXd r = s.Q.transpose() * s.pi;
    return r.cwiseAbs().maxCoeff();
}

double reversibility_defect(const ExactSystem& s) {
    double worst = 0.0;
    for (int i = 0; i < s.Q.outerSize(); ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(s.Q, i); it; ++it)
            worst = std::max(worst, std::abs(s.pi[i] * it.value() - s.pi[it.col()] * s.Q.coeff(it.col(), i)));
    return worst;
}

namespace {

// v <- exp(h Q) v by Taylor series on substeps with h ||Q||_inf / m <= 1.
void expm_action(const ExactSystem& s, double h, Eigen::VectorXd& v) {
    if (h <= 0.0) return;
    const double norm = 2.0 * s.max_exit_rate;
    const int m = std::max(1, static_cast<int>(std::ceil(h * norm)));
    const double dt = h / m;
    Eigen::VectorXd term, acc;
    for (int j = 0; j < m; ++j) {
        acc = v;
        term = v;
        const double scale = v.cwiseAbs().maxCoeff();
        for (int k = 1; k < 60; ++k) {
            term = (dt / k) * (s.Q * term);
            acc += term;
            if (term.cwiseAbs().maxCoeff() <= 1e-18 * scale) break;
        }
        v.swap(acc);
    }
}

}  // namespace

std::vector<ExactValue> exact_variance_curve(const ExactSystem& s, const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1])))
            throw Error(ErrorCode::BadInterval, "times must be positive and increasing");

    // Panels of width <= 2 / max_exit_rate; two Gauss rules per panel give the error estimate.
    const double h_max = s.max_exit_rate > 0.0 ? 2.0 / s.max_exit_rate : 1.0;
    const auto& hi = special::gauss_legendre(14);
    const auto& lo = special::gauss_legendre(10);

    std::vector<ExactValue> out;
    Eigen::VectorXd v = s.f;
    double pos = 0.0;
    double A = 0.0, B = 0.0, A_lo = 0.0, B_lo = 0.0, err = 0.0;
    double left = 0.0;
    for (double t : times) {
        const int panels = std::max(1, static_cast<int>(std::ceil((t - left) / h_max)));
        const double w = (t - left) / panels;
        for (int p = 0; p < panels; ++p) {
            const double a = left + p * w;
            // Merge both node sets and march in increasing s.
            std::vector<std::pair<double, std::pair<double, double>>> nodes;  // s, (w_hi, w_lo)
            for (std::size_t i = 0; i < hi.x.size(); ++i)
                nodes.push_back({a + 0.5 * w * (hi.x[i] + 1.0), {0.5 * w * hi.w[i], 0.0}});
            for (std::size_t i = 0; i < lo.x.size(); ++i)
                nodes.push_back({a + 0.5 * w * (lo.x[i] + 1.0), {0.0, 0.5 * w * lo.w[i]}});
            std::sort(nodes.begin(), nodes.end());
            double pa = 0.0, pb = 0.0, pa_lo = 0.0, pb_lo = 0.0;
            for (const auto& [sn, wt] : nodes) {
                expm_action(s, sn - pos, v);
                pos = sn;
                const double c = s.inner(s.f, v);
                pa += wt.first * c;
                pb += wt.first * sn * c;
                pa_lo += wt.second * c;
                pb_lo += wt.second * sn * c;
            }
            A += pa;
            B += pb;
            A_lo += pa_lo;
            B_lo += pb_lo;
        }
        expm_action(s, t - pos, v);
        pos = t;
        left = t;
        err = 2.0 * (t * std::abs(A - A_lo) + std::abs(B - B_lo));
        const double value = 2.0 * (t * A - B);
        const double bound = err + 1e-14 * (std::abs(value) + t * t * s.inner(s.f, s.f));
        if (!std::isfinite(value) || bound > 1e-6 * (std::abs(value) + 1e-300))
            if (bound > 1e-12) throw Error(ErrorCode::QuadratureFail, "time-domain quadrature did not converge");
        out.push_back({value, bound});
    }
    return out;
}

ExactValue exact_variance(const ExactSystem& s, double t) {
    if (!(t > 0.0)) throw Error(ErrorCode::BadInterval, "t must be positive");
    return exact_variance_curve(s, {t}).front();
}

std::vector<double> exact_variance_eigen(const ExactSystem& s, const std::vector<double>& times) {
    const Eigen::Index n = static_cast<Eigen::Index>(s.states());
    if (reversibility_defect(s) > 1e-10) throw Error(ErrorCode::NotSymmetric, "generator is not reversible");
    Eigen::VectorXd sq = s.pi.cwiseSqrt();
    Eigen::MatrixXd M = Eigen::MatrixXd(s.Q);
    M = sq.asDiagonal() * M * sq.cwiseInverse().asDiagonal();
    M = 0.5 * (M + M.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::NotSymmetric, "eigensolver failed");
    Eigen::VectorXd c = es.eigenvectors().transpose() * (sq.array() * s.f.array()).matrix();
    std::vector<double> out;
    for (double t : times) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double mu = std::max(-es.eigenvalues()[k], 0.0);
            const double x = mu * t;
            // int_0^t (t - s) e^{-mu s} ds = t^2 (x + expm1(-x)) / x^2
            const double phi = x < 1e-3 ? 0.5 - x / 6.0 + x * x / 24.0 : (x + std::expm1(-x)) / (x * x);
            acc += c[k] * c[k] * phi;
        }
        out.push_back(2.0 * t * t * acc);
    }
    return out;
}

double exact_resolvent(const ExactSystem& s, double lambda) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::BadInterval, "lambda must be positive");
    Eigen::SparseMatrix<double> M(s.Q);
    M *= -1.0;
    for (Eigen::Index i = 0; i < M.rows(); ++i) M.coeffRef(i, i) += lambda;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(M);
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::SingularSolve, "factorization failed");
    Eigen::VectorXd u = lu.solve(s.f);
    if (lu.info() != Eigen::Success || !u.allFinite()) throw Error(ErrorCode::SingularSolve, "solve failed");
    return 2.0 / (lambda * lambda) * s.inner(s.f, u);
}

ExactValue exact_laplace_time_domain(const ExactSystem& s, double lambda) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::BadInterval, "lambda must be positive");
    // Geometric panels on [0, 40 / lambda]; sigma_t^2 <= t^2 Var makes the remainder negligible.
    const double T = 40.0 / lambda;
    std::vector<double> edges{0.0};
    for (double e = std::min(1.0, T / 64.0); e < T; e *= 2.0) edges.push_back(e);
    edges.push_back(T);
    const auto& hi = special::gauss_legendre(16);
    const auto& lo = special::gauss_legendre(11);
    struct Node {
        double t, w_hi, w_lo;
    };
    std::vector<Node> nodes;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double a = edges[p], h = edges[p + 1] - edges[p];
        for (std::size_t i = 0; i < hi.x.size(); ++i)
            nodes.push_back({a + 0.5 * h * (hi.x[i] + 1.0), 0.5 * h * hi.w[i], 0.0});
        for (std::size_t i = 0; i < lo.x.size(); ++i)
            nodes.push_back({a + 0.5 * h * (lo.x[i] + 1.0), 0.0, 0.5 * h * lo.w[i]});
    }
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.t < b.t; });
    std::vector<double> ts;
    for (const auto& nd : nodes)
        if (ts.empty() || nd.t > ts.back()) ts.push_back(nd.t);
    const auto curve = exact_variance_curve(s, ts);
    double v_hi = 0.0, v_lo = 0.0, err = 0.0;
    std::size_t j = 0;
    for (const auto& nd : nodes) {
        while (ts[j] < nd.t) ++j;
        const double e = std::exp(-lambda * nd.t);
        v_hi += nd.w_hi * e * curve[j].value;
        v_lo += nd.w_lo * e * curve[j].value;
        err += (nd.w_hi + nd.w_lo) * e * curve[j].err_bound;
    }
    return {v_hi, std::abs(v_hi - v_lo) + err};
}

std::string oracle_csv(const ExactSystem& s, const std::vector<OracleRow>& rows) {
    std::string out = "L,alpha,variant,rho,t_or_lambda,value,err_bound\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%s,%.17g,%.17g,%.17g,%.17g\n", s.L, s.alpha, to_string(s.variant),
                      s.rho, r.t_or_lambda, r.value, r.err_bound);
        out += buf;
    }
    return out;
}

}  // namespace lrex
