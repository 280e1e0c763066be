#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lrex/error.hpp"
#include "lrex/oracle/exact.hpp"

#include <Eigen/Dense>
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

const FunctionalSpec kOrigin{FunctionalSpec::Kind::Degree1, 0, 1, 0.5};

// Dense generator assembled straight from the kernel table: every tabled y
// moves the particle on x to (x + y) mod L when that site is empty.
Eigen::MatrixXd dense_generator(const JumpKernel& k, int L) {
    const int n = 1 << L;
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    for (int s = 0; s < n; ++s)
        for (int x = 0; x < L; ++x) {
            if (!(s >> x & 1)) continue;
            for (const auto& y : k.displacements()) {
                const int to = ((x + y[0]) % L + L) % L;
                if (to == x || (s >> to & 1)) continue;
                const int t = (s & ~(1 << x)) | (1 << to);
                Q(s, t) += k.p(y);
                Q(s, s) -= k.p(y);
            }
        }
    return Q;
}

// Variance of the occupation time of site 0 from an eigendecomposition of the
// pi-symmetrized dense generator (reversible kernels only).
double eigen_oracle(const JumpKernel& k, int L, double rho, double t) {
    const Eigen::MatrixXd Q = dense_generator(k, L);
    const int n = 1 << L;
    Eigen::VectorXd pi(n), f(n);
    for (int s = 0; s < n; ++s) {
        const int m = __builtin_popcount(static_cast<unsigned>(s));
        pi[s] = std::pow(rho, m) * std::pow(1 - rho, L - m);
        f[s] = (s & 1) - rho;
    }
    const Eigen::VectorXd r = pi.cwiseSqrt();
    const Eigen::MatrixXd S = r.asDiagonal() * Q * r.cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()));
    const Eigen::VectorXd c = es.eigenvectors().transpose() * (r.array() * f.array()).matrix();
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
        const double mu = -es.eigenvalues()[i];
        // 2 int_0^t (t - s) e^{-mu s} ds
        const double w = mu < 1e-12 ? t * t : 2.0 * (t / mu - (1.0 - std::exp(-mu * t)) / (mu * mu));
        v += c[i] * c[i] * w;
    }
    return v;
}

}  // namespace

TEST_CASE("two-site ring is the two-state hop chain") {
    const auto k = build_kernel(1, 1.5, {2.0}, {1.0}, Variant::LA, 1);
    const auto s = build_exact(k, 2, 0.5);
    const Eigen::MatrixXd Q = s.Q;
    // States 01 and 10 exchange at p(1) + p(-1) = 1; 00 and 11 are frozen.
    const Eigen::Matrix4d want{{0, 0, 0, 0}, {0, -1, 1, 0}, {0, 1, -1, 0}, {0, 0, 0, 0}};
    CHECK((Q - want).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(ring_rates(k, 2)[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("generator matches an independent dense assembly") {
    for (Variant v : {Variant::SYM, Variant::LA, Variant::MZA}) {
        const auto k = v == Variant::SYM ? build_kernel(1, 1.5, {1.0}, {1.0}, v, 4)
                                         : build_kernel(1, 1.5, {1.1}, {1.0}, v, 4);
        const auto s = build_exact(k, 7, 0.3);
        const Eigen::MatrixXd Q = s.Q;
        const Eigen::MatrixXd want = dense_generator(k, 7);
        CHECK((Q - want).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(Q.rowwise().sum().cwiseAbs().maxCoeff() < 1e-14);
        for (int i = 0; i < Q.rows(); ++i)
            for (int j = 0; j < Q.cols(); ++j)
                if (i != j) REQUIRE(Q(i, j) >= 0.0);
    }
}

TEST_CASE("product Bernoulli is invariant and reversibility tracks symmetry") {
    const auto sym = build_kernel(1, 1.5, {1.0}, {1.0}, Variant::SYM, 4);
    const auto la = build_kernel(1, 1.5, {2.0}, {1.0}, Variant::LA, 4);
    for (double rho : {0.5, 0.2}) {
        const auto a = build_exact(sym, 8, rho), b = build_exact(la, 8, rho);
        CHECK(stationarity_residual(a) < 1e-10);
        CHECK(stationarity_residual(b) < 1e-10);
        CHECK(reversibility_defect(a) < 1e-10);
        CHECK(reversibility_defect(b) > 1e-3);
        CHECK(code_of([&] { exact_variance_eigen(b, {1.0}); }) == ErrorCode::NotSymmetric);
    }
}

TEST_CASE("build errors") {
    const auto k = build_kernel(1, 1.5, {1.0}, {1.0}, Variant::SYM, 4);
    CHECK(code_of([&] { build_exact(k, 13, 0.5); }) == ErrorCode::StateSpaceTooLarge);
    CHECK(code_of([&] { build_exact(k, 1, 0.5); }) == ErrorCode::BadSize);
    CHECK(code_of([&] { build_exact(k, 8, 1.0); }) == ErrorCode::BadDensity);
    const auto k2 = build_kernel(2, 1.5, {1.0, 1.0}, {1.0, 1.0}, Variant::SYM, 2);
    CHECK(code_of([&] { build_exact(k2, 4, 0.5); }) == ErrorCode::BadSize);
    const auto s = build_exact(k, 6, 0.5);
    CHECK(code_of([&] { exact_variance(s, 0.0); }) == ErrorCode::BadInterval);
    CHECK(code_of([&] { exact_variance_curve(s, {2.0, 1.0}); }) == ErrorCode::BadInterval);
    CHECK(code_of([&] { exact_resolvent(s, 0.0); }) == ErrorCode::BadInterval);
}

TEST_CASE("variance at short times and for a vanishing observable") {
    const auto k = build_kernel(1, 1.5, {2.0}, {1.0}, Variant::LA, 4);
    auto s = build_exact(k, 8, 0.3, {FunctionalSpec::Kind::Degree1, 0, 1, 0.3});
    const double t = 1e-3;
    CHECK(exact_variance(s, t).value / (t * t) == doctest::Approx(0.21).epsilon(1e-3));
    s.f.setZero();
    CHECK(exact_variance(s, 1.0).value == 0.0);
    CHECK(exact_resolvent(s, 1.0) == 0.0);
}

TEST_CASE("ring of 10 reference variance") {
    const auto k = build_kernel(1, 1.5, {1.0}, {1.0}, Variant::SYM, 5);
    const auto s = build_exact(k, 10, 0.5, kOrigin);
    const auto v = exact_variance(s, 5.0);
    const double ref = eigen_oracle(k, 10, 0.5, 5.0);
    CHECK(v.value == doctest::Approx(ref).epsilon(1e-9));
    CHECK(v.err_bound < 1e-9);
    // Frozen from eigen_oracle.
    CHECK(v.value == doctest::Approx(2.5199333).epsilon(1e-7));
    const auto eig = exact_variance_eigen(s, {1.0, 2.0, 5.0});
    CHECK(eig[2] == doctest::Approx(v.value).epsilon(1e-10));
    CHECK(eig[0] == doctest::Approx(eigen_oracle(k, 10, 0.5, 1.0)).epsilon(1e-10));
}

TEST_CASE("resolvent limits and the exact Laplace identity") {
    const auto k = build_kernel(1, 1.5, {1.0}, {1.0}, Variant::SYM, 4);
    const auto s = build_exact(k, 8, 0.5, kOrigin);
    // (lambda - Q)^{-1} -> 1/lambda: 2 lambda^{-3} Var f (1 + O(1/lambda)).
    const double lam = 1e4;
    CHECK(exact_resolvent(s, lam) / (2.0 * 0.25 / (lam * lam * lam)) == doctest::Approx(1.0).epsilon(1e-3));
    for (double l : {0.1, 0.5, 2.0}) {
        const auto td = exact_laplace_time_domain(s, l);
        CHECK(exact_resolvent(s, l) == doctest::Approx(td.value).epsilon(1e-6));
    }
}

TEST_CASE("asymmetry never increases the resolvent at half filling") {
    const auto sym = build_kernel(1, 1.5, {1.5}, {1.5}, Variant::SYM, 4);
    const auto la = build_kernel(1, 1.5, {2.0}, {1.0}, Variant::LA, 4);
    const auto mza = build_kernel(1, 1.5, {1.1}, {1.0}, Variant::MZA, 4);
    for (const auto* k : {&la, &mza}) {
        const auto a = build_exact(*k, 9, 0.5, kOrigin);
        const auto b = build_exact(k->symmetrized(), 9, 0.5, kOrigin);
        for (double l : {0.05, 0.3, 1.0, 4.0}) CHECK(exact_resolvent(a, l) <= exact_resolvent(b, l) * (1 + 1e-12));
    }
    // LA and its symmetrization share s, so the symmetrized resolvent is the SYM one.
    const auto a = build_exact(la.symmetrized(), 9, 0.5, kOrigin), b = build_exact(sym, 9, 0.5, kOrigin);
    CHECK(exact_resolvent(a, 0.3) == doctest::Approx(exact_resolvent(b, 0.3)).epsilon(1e-12));
}

TEST_CASE("symmetric variance is nondecreasing") {
    const auto k = build_kernel(1, 0.8, {1.0}, {1.0}, Variant::SYM, 5);
    const auto s = build_exact(k, 10, 0.5, kOrigin);
    std::vector<double> t;
    for (int i = 1; i <= 30; ++i) t.push_back(0.5 * i);
    const auto v = exact_variance_curve(s, t);
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i].value >= v[i - 1].value);
}

TEST_CASE("oracle CSV") {
    const auto k = build_kernel(1, 1.5, {1.0}, {1.0}, Variant::SYM, 2);
    const auto s = build_exact(k, 4, 0.5);
    const std::string csv = oracle_csv(s, {{1.0, 0.5, 1e-12}});
    CHECK(csv.rfind("L,alpha,variant,rho,t_or_lambda,value,err_bound\n", 0) == 0);
    CHECK(csv.find("4,1.5,SYM,0.5,1,0.5,") != std::string::npos);
}
