#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lrex/analysis/fit.hpp"
#include "lrex/error.hpp"
#include "lrex/oracle/exact.hpp"
#include "lrex/sim/lattice.hpp"
#include "lrex/sim/occupation.hpp"

#include <cmath>
#include <cstring>
#include <numeric>

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

double occupied_fraction(const LatticeConfig& c) {
    return std::accumulate(c.occ.begin(), c.occ.end(), 0.0) / static_cast<double>(c.sites());
}

// Ring of 4 with particles on 0, 1, 2 and a hole on 3.
LatticeConfig one_hole_ring() {
    LatticeConfig c = init_bernoulli(4, 1, 1.0 - 1e-12, 1);
    REQUIRE(c.particles.size() == 4);
    c.remove_particle(3);
    return c;
}

// Replicas [lo, hi) of a stats block, keeping their ids.
ReplicaStats slice(const ReplicaStats& s, std::size_t lo, std::size_t hi) {
    ReplicaStats out;
    out.t_grid = s.t_grid;
    const std::size_t G = s.grid_size();
    for (std::size_t r = lo; r < hi; ++r) {
        out.replica_ids.push_back(s.replica_ids[r]);
        for (std::size_t g = 0; g < G; ++g) {
            out.gamma.push_back(s.gamma[r * G + g]);
            out.cov.push_back(s.cov[r * G + g]);
            out.density.push_back(s.density[r * G + g]);
        }
    }
    return out;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("Bernoulli initial configuration") {
    const auto c = init_bernoulli(64, 2, 0.5, 42);
    CHECK(c.sites() == 4096);
    CHECK(c.consistent());
    CHECK(c.time == 0.0);
    CHECK(std::abs(occupied_fraction(c) - 0.5) < 3.0 * std::sqrt(0.25 / 4096));

    const auto d = init_bernoulli(64, 2, 0.5, 42);
    CHECK(c.occ == d.occ);
    CHECK(c.particles == d.particles);

    CHECK(init_bernoulli(64, 1, 1.0 - 1e-9, 3).particles.size() == 64);

    CHECK(code_of([] { init_bernoulli(7, 1, 0.5, 1); }) == ErrorCode::BadSize);
    CHECK(code_of([] { init_bernoulli(2, 1, 0.5, 1); }) == ErrorCode::BadSize);
    CHECK(code_of([] { init_bernoulli(8, 3, 0.5, 1); }) == ErrorCode::BadSize);
    CHECK(code_of([] { init_bernoulli(8, 1, 1.0, 1); }) == ErrorCode::BadDensity);
    CHECK(code_of([] { init_bernoulli(8, 1, 0.0, 1); }) == ErrorCode::BadDensity);
}

TEST_CASE("single-hole ring follows the nearest-neighbour direction law") {
    // p(+1) = 2/3, p(-1) = 1/3. Only the particle on 2 (jumping +1) or on 0 (jumping -1)
    // can reach the hole, each chosen with probability 1/3.
    const auto k = build_kernel(1, 1.0, {1.0}, {0.5}, Variant::NNA, 1);
    CHECK(k.p({1, 0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    Rng rng(5);
    const int n = 300000;
    int right = 0, left = 0;
    for (int i = 0; i < n; ++i) {
        auto c = one_hole_ring();
        const auto r = step(c, k, rng);
        if (r.accepted && r.y[0] == 1) {
            ++right;
            CHECK(r.mover_site == 2);
        }
        if (r.accepted && r.y[0] == -1) {
            ++left;
            CHECK(r.mover_site == 0);
        }
    }
    const auto near = [n](int hits, double p) { return std::abs(hits / double(n) - p) < 4.0 * std::sqrt(p * (1 - p) / n); };
    CHECK(near(right, 2.0 / 9.0));
    CHECK(near(left, 1.0 / 9.0));
}

TEST_CASE("suppressed attempts leave the configuration alone but advance time") {
    const auto k = build_kernel(1, 1.0, {1.0}, {0.5}, Variant::NNA, 1);
    Rng rng(9);
    int suppressed = 0;
    for (int i = 0; i < 1000; ++i) {
        auto c = one_hole_ring();
        const auto before = c.occ;
        const auto r = step(c, k, rng);
        CHECK(c.time == r.dwell);
        CHECK(r.dwell > 0.0);
        if (!r.accepted) {
            ++suppressed;
            CHECK(c.occ == before);
        }
    }
    CHECK(suppressed > 0);

    auto full = init_bernoulli(4, 1, 1.0 - 1e-12, 1);
    CHECK(code_of([&] { step(full, k, rng); }) == ErrorCode::NoParticle);
}

TEST_CASE("particle number is conserved and dwell times have rate #particles") {
    for (int dim : {1, 2}) {
        const auto k = dim == 1 ? build_kernel(1, 1.5, {2.0}, {1.0}, Variant::LA, 32)
                                : build_kernel(2, 1.0, {2.0, 1.0}, {1.0, 1.0}, Variant::LA, 8);
        auto c = init_bernoulli(dim == 1 ? 64 : 16, dim, 0.3, 77);
        const std::size_t n = c.particles.size();
        Rng rng(3);
        double dwell = 0.0, dwell_sq = 0.0;
        const int steps = 1000000;
        for (int i = 0; i < steps; ++i) {
            const double d = step(c, k, rng).dwell;
            dwell += d;
            dwell_sq += d * d;
        }
        CHECK(c.particles.size() == n);
        CHECK(c.consistent());
        const double mean = dwell / steps, sd = std::sqrt(dwell_sq / steps - mean * mean);
        CHECK(std::abs(mean - 1.0 / n) < 4.0 * sd / std::sqrt(double(steps)));
    }
}

TEST_CASE("coupled dynamics keep the discrepancy distinct from eta") {
    const auto k = build_kernel(1, 1.5, {2.0}, {1.0}, Variant::LA, 32);
    auto c = init_bernoulli(64, 1, 0.5, 8);
    place_second_class_at_origin(c);
    const std::size_t n = c.particles.size();
    Rng rng(1);
    int moved = 0;
    for (int i = 0; i < 100000; ++i) moved += step_coupled(c, k, rng).second_class_moved;
    CHECK(c.consistent());
    CHECK(c.particles.size() == n);
    CHECK(moved > 0);
    auto plain = init_bernoulli(64, 1, 0.5, 8);
    CHECK(code_of([&] { step_coupled(plain, k, rng); }) == ErrorCode::NoParticle);
}

TEST_CASE("second-class particle in symmetric systems is a free s-walk") {
    // Under SYM its total jump rate to x + y is s(y) regardless of eta, so
    // E|R_t|^2 = t sum_y y^2 s(y) exactly.
    for (double alpha : {1.5, 3.0}) {
        const auto k = build_kernel(1, alpha, {1.0}, {1.0}, Variant::SYM, 128);
        double m2 = 0.0;
        for (const auto& y : k.displacements()) m2 += double(y[0]) * y[0] * k.p(y);
        const auto mo = second_class_moments(k, 256, 0.5, {5.0}, 20000, 11);
        CAPTURE(alpha);
        CHECK(std::abs(mo.mean_sq[0].value - 5.0 * m2) < 3.0 * mo.mean_sq[0].se);
        CHECK(std::abs(mo.mean_x[0].value) < 3.0 * mo.mean_x[0].se);
    }
}

TEST_CASE("second-class drift under asymmetry") {
    const auto k = build_kernel(1, 3.0, {2.0}, {1.0}, Variant::LA, 128);
    const double m = k.mean()[0];
    // Nearly empty lattice: a lone p-walk with drift m.
    const auto lone = second_class_moments(k, 256, 1e-4, {5.0}, 20000, 21);
    CHECK(std::abs(lone.mean_x[0].value - 5.0 * m) < 3.0 * lone.mean_x[0].se);
    // Half filling: drift (1 - 2 rho) m vanishes.
    const auto half = second_class_moments(k, 256, 0.5, {5.0}, 20000, 22);
    CHECK(std::abs(half.mean_x[0].value) < 3.0 * half.mean_x[0].se);
    CHECK(std::abs(lone.mean_x[0].value) > 10.0 * lone.mean_x[0].se);
}

TEST_CASE("occupation time at short times and stationarity") {
    const auto k = build_kernel(1, 1.5, {2.0}, {1.0}, Variant::LA, 32);
    const FunctionalSpec f{FunctionalSpec::Kind::Degree1, 0, 1, 0.5};
    const auto st = run_occupation(k, 64, 0.5, {1e-3, 0.5, 2.0}, 20000, f, 100);
    CHECK(st.n() == 20000);
    // Gamma(t) ~ f(eta_0) t for small t, so Var / t^2 -> chi(rho) = 1/4.
    CHECK(st.var_gamma(0).value / 1e-6 == doctest::Approx(0.25).epsilon(0.01));
    for (std::size_t g = 0; g < st.grid_size(); ++g) {
        CHECK(std::abs(st.mean_gamma(g).value) < 3.0 * st.mean_gamma(g).se);
        CHECK(std::abs(st.mean_density(g).value - 0.5) < 3.0 * st.mean_density(g).se);
    }
    CHECK(st.suppressed_fraction > 0.3);
    CHECK(st.suppressed_fraction < 0.7);
    CHECK(code_of([&] { run_occupation(k, 64, 0.5, {1.0, 0.5}, 4, f, 1); }) == ErrorCode::BadInterval);
    CHECK(code_of([&] { run_occupation(k, 64, 0.5, {1.0}, 1, f, 1); }) == ErrorCode::TooFewReplicas);
}

TEST_CASE("Monte Carlo variance on a ring of 10 matches the exact generator") {
    const auto k = build_kernel(1, 1.5, {1.0}, {1.0}, Variant::SYM, 5);
    const FunctionalSpec f{FunctionalSpec::Kind::Degree1, 0, 1, 0.5};
    const std::vector<double> t{1.0, 2.0, 5.0};
    const auto st = run_occupation(k, 10, 0.5, t, 40000, f, 200);
    const auto sys = build_exact(k, 10, 0.5, f);
    const auto ex = exact_variance_curve(sys, t);
    for (std::size_t g = 0; g < t.size(); ++g) {
        CAPTURE(t[g]);
        CHECK(std::abs(st.var_gamma(g).value - ex[g].value) < 3.0 * st.var_gamma(g).se);
    }
}

TEST_CASE("symmetric covariance stays nonnegative") {
    const auto k = build_kernel(1, 1.5, {1.0}, {1.0}, Variant::SYM, 32);
    const FunctionalSpec f{FunctionalSpec::Kind::Degree1, 0, 1, 0.5};
    const auto st = run_occupation(k, 64, 0.5, {0.5, 1.0, 2.0, 4.0, 8.0}, 20000, f, 300);
    for (std::size_t g = 0; g < st.grid_size(); ++g) CHECK(st.mean_cov(g).value > -3.0 * st.mean_cov(g).se);
}

TEST_CASE("symmetric growth exponent in d = 1") {
    // sigma_t^2 ~ t^{2 - 1/alpha} = t^{4/3} for alpha = 1.5.
    const auto k = build_kernel(1, 1.5, {1.0}, {1.0}, Variant::SYM, 512);
    const FunctionalSpec f{FunctionalSpec::Kind::Degree1, 0, 1, 0.5};
    std::vector<double> t;
    for (int i = 0; i <= 8; ++i) t.push_back(20.0 * std::pow(10.0, i / 8.0));
    const auto st = run_occupation(k, 1024, 0.5, t, 1200, f, 400);
    std::vector<double> v, e;
    for (std::size_t g = 0; g < t.size(); ++g) {
        v.push_back(st.var_gamma(g).value);
        e.push_back(st.var_gamma(g).se);
    }
    const auto fit = fit_exponent(t, v, e, {});
    CHECK(fit.beta == doctest::Approx(4.0 / 3.0).epsilon(0.06));
}

TEST_CASE("covariance identity through the second-class particle") {
    for (Variant v : {Variant::SYM, Variant::LA}) {
        CAPTURE(to_string(v));
        const auto k = v == Variant::SYM ? build_kernel(1, 1.5, {1.0}, {1.0}, v, 128)
                                         : build_kernel(1, 1.5, {2.0}, {1.0}, v, 128);
        const auto rep = covariance_identity_check(k, 256, 0.5, {0.0, 0.5, 1.0, 2.0}, 40000, 500);
        REQUIRE(rep.rows.size() == 4);
        // s = 0: both sides equal chi(rho) with no sampling noise.
        CHECK(rep.rows[0].cov.value == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(rep.rows[0].chi_p0.value == doctest::Approx(0.25).epsilon(1e-12));
        for (const auto& r : rep.rows) CHECK(std::abs(r.z) < 3.0);
    }
}

TEST_CASE("coupled marginals are exclusion processes") {
    const auto k = build_kernel(1, 1.5, {2.0}, {1.0}, Variant::LA, 64);
    const auto rows = coupled_marginal_check(k, 128, 0.5, {0.5, 2.0}, 20000, 600);
    for (const auto& r : rows) {
        CHECK(std::abs(r.z_upper) < 3.0);
        CHECK(std::abs(r.z_lower) < 3.0);
    }
}

TEST_CASE("event-log replay reproduces Gamma bitwise at any grid resolution") {
    const auto k = build_kernel(1, 1.5, {2.0}, {1.0}, Variant::LA, 32);
    const FunctionalSpec f{FunctionalSpec::Kind::Degree2, 3, 4, 0.4};
    std::vector<double> fine;
    for (int i = 1; i <= 40; ++i) fine.push_back(0.25 * i);
    std::vector<double> coarse;
    for (std::size_t i = 1; i < fine.size(); i += 2) coarse.push_back(fine[i]);

    std::vector<EventRecord> log;
    OccupationOptions opt;
    opt.event_log = &log;
    const auto st = run_occupation(k, 64, 0.4, fine, 2, f, 900, opt);
    REQUIRE(!log.empty());

    Rng rng(900);
    const auto start = init_bernoulli(64, 1, 0.4, rng);
    const auto full = replay_occupation(start, log, f, fine);
    std::vector<double> live(fine.size());
    for (std::size_t g = 0; g < fine.size(); ++g) live[g] = st.gamma_at(0, g);
    CHECK(same_bits(full, live));

    const auto half = replay_occupation(start, log, f, coarse);
    std::vector<double> shared;
    for (std::size_t i = 1; i < fine.size(); i += 2) shared.push_back(full[i]);
    CHECK(same_bits(half, shared));
}

TEST_CASE("merge is order-independent and reruns are deterministic") {
    const auto k = build_kernel(1, 1.5, {2.0}, {1.0}, Variant::LA, 32);
    const FunctionalSpec f{};
    const auto st = run_occupation(k, 64, 0.5, {1.0, 3.0}, 8, f, 5);
    const auto again = run_occupation(k, 64, 0.5, {1.0, 3.0}, 8, f, 5, {.threads = 3});
    CHECK(same_bits(st.gamma, again.gamma));

    auto a = slice(st, 0, 3), b = slice(st, 3, 8);
    auto ab = a;
    ab.merge(b);
    auto ba = b;
    ba.merge(a);
    CHECK(ab.replica_ids == st.replica_ids);
    CHECK(same_bits(ab.gamma, st.gamma));
    CHECK(same_bits(ba.gamma, st.gamma));
    CHECK(same_bits(ba.cov, st.cov));

    auto other = run_occupation(k, 64, 0.5, {1.0, 2.0}, 2, f, 5);
    CHECK(code_of([&] { ab.merge(other); }) == ErrorCode::GridMismatch);
}

TEST_CASE("finite-size guard warns once the spread passes L/4") {
    const auto k = build_kernel(1, 1.0, {1.0}, {1.0}, Variant::SYM, 8);
    const FunctionalSpec f{};
    CHECK(run_occupation(k, 16, 0.5, {1.0}, 2, f, 1).warnings.empty());
    CHECK(!run_occupation(k, 16, 0.5, {1.0, 5.0}, 2, f, 1).warnings.empty());
}
