#include "lrex/sim/occupation.hpp"

#include "lrex/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <mutex>
#include <thread>
#include <tuple>

namespace lrex {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = std::max(1, threads);
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::mutex failure_mu;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

namespace {

Estimate mean_se(const std::vector<double>& data, std::size_t stride, std::size_t offset, std::size_t n) {
    double m = 0.0;
    for (std::size_t r = 0; r < n; ++r) m += data[r * stride + offset];
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double d = data[r * stride + offset] - m;
        ss += d * d;
    }
    double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
    return {m, std::sqrt(var / static_cast<double>(n))};
}

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw Error(ErrorCode::BadInterval, "empty time grid");
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!(grid[i] >= 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
            throw Error(ErrorCode::BadInterval, "time grid must be nonnegative and strictly increasing");
}

std::string spread_warning(const JumpKernel& k, int L, double t_max) {
    double spread = std::pow(t_max, 1.0 / std::min(k.alpha(), 2.0));
    if (spread > L / 4.0)
        return "finite-size guard: spread estimate " + std::to_string(spread) + " exceeds L/4 = " +
               std::to_string(L / 4.0);
    return {};
}

struct SingleRun {
    std::uint64_t attempts = 0, suppressed = 0;
};

// Event loop shared by the live run and the replay: `advance` performs one event
// and returns false when no further event exists.
template <class Advance, class Record>
void occupation_loop(LatticeConfig& c, const FunctionalSpec& f, const std::vector<double>& grid, Advance advance,
                     Record record) {
    const double f0 = f.value(c);
    double fcur = f0, gam = 0.0, t = c.time;
    std::size_t g = 0;
    while (g < grid.size()) {
        const double fb = fcur;
        const int occ0 = c.occ[f.x0];
        double te;
        if (!advance(te)) te = INFINITY;
        while (g < grid.size() && grid[g] < te) {
            record(g, gam + fb * (grid[g] - t), fb * f0, occ0);
            ++g;
        }
        if (te == INFINITY) break;
        gam += fb * (te - t);
        t = te;
        fcur = f.value(c);
    }
}

}  // namespace

Estimate ReplicaStats::mean_gamma(std::size_t g) const { return mean_se(gamma, grid_size(), g, n()); }
Estimate ReplicaStats::mean_cov(std::size_t g) const { return mean_se(cov, grid_size(), g, n()); }
Estimate ReplicaStats::mean_density(std::size_t g) const { return mean_se(density, grid_size(), g, n()); }

Estimate ReplicaStats::var_gamma(std::size_t g) const {
    const std::size_t nn = n(), G = grid_size();
    double m = mean_gamma(g).value;
    double s2 = 0.0, s4 = 0.0;
    for (std::size_t r = 0; r < nn; ++r) {
        double d = gamma[r * G + g] - m;
        s2 += d * d;
        s4 += d * d * d * d;
    }
    double v = s2 / static_cast<double>(nn - 1);
    double m4 = s4 / static_cast<double>(nn);
    return {v, std::sqrt(std::max(m4 - v * v, 0.0) / static_cast<double>(nn))};
}

void ReplicaStats::merge(const ReplicaStats& other) {
    if (other.t_grid != t_grid) throw Error(ErrorCode::GridMismatch, "cannot merge stats on different grids");
    const std::size_t G = grid_size();
    ReplicaStats out;
    out.t_grid = t_grid;
    std::vector<std::tuple<std::uint64_t, const ReplicaStats*, std::size_t>> all;
    for (std::size_t r = 0; r < n(); ++r) all.emplace_back(replica_ids[r], this, r);
    for (std::size_t r = 0; r < other.n(); ++r) all.emplace_back(other.replica_ids[r], &other, r);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
    for (const auto& [id, src, r] : all) {
        out.replica_ids.push_back(id);
        for (std::size_t g = 0; g < G; ++g) {
            out.gamma.push_back(src->gamma[r * G + g]);
            out.cov.push_back(src->cov[r * G + g]);
            out.density.push_back(src->density[r * G + g]);
        }
    }
    out.attempts = attempts + other.attempts;
    double supp = suppressed_fraction * static_cast<double>(attempts) +
                  other.suppressed_fraction * static_cast<double>(other.attempts);
    out.suppressed_fraction = out.attempts ? supp / static_cast<double>(out.attempts) : 0.0;
    out.warnings = warnings;
    for (const auto& w : other.warnings)
        if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end()) out.warnings.push_back(w);
    *this = std::move(out);
}

ReplicaStats run_occupation(const JumpKernel& k, int L, double rho, const std::vector<double>& t_grid,
                            std::size_t n_replicas, const FunctionalSpec& f, std::uint64_t seed,
                            const OccupationOptions& opt) {
    check_grid(t_grid);
    if (n_replicas < 2) throw Error(ErrorCode::TooFewReplicas, "need at least 2 replicas");
    const std::size_t G = t_grid.size();
    ReplicaStats st;
    st.t_grid = t_grid;
    st.replica_ids.resize(n_replicas);
    std::iota(st.replica_ids.begin(), st.replica_ids.end(), std::uint64_t{0});
    st.gamma.assign(n_replicas * G, 0.0);
    st.cov.assign(n_replicas * G, 0.0);
    st.density.assign(n_replicas * G, 0.0);
    std::vector<SingleRun> runs(n_replicas);
    parallel_for(n_replicas, opt.threads, [&](std::size_t r) {
        Rng rng(seed + r);
        LatticeConfig c = init_bernoulli(L, k.dim(), rho, rng);
        if (f.x0 < 0 || static_cast<std::size_t>(f.x0) >= c.sites() || f.x1 < 0 ||
            static_cast<std::size_t>(f.x1) >= c.sites())
            throw Error(ErrorCode::BadSize, "observable site outside the lattice");
        std::vector<EventRecord>* log = (r == 0) ? opt.event_log : nullptr;
        if (log) log->clear();
        SingleRun& sr = runs[r];
        const bool frozen = c.particles.empty() || c.particles.size() == c.sites();
        occupation_loop(
            c, f, t_grid,
            [&](double& te) {
                if (frozen) return false;
                StepResult res = step(c, k, rng);
                ++sr.attempts;
                if (!res.accepted) ++sr.suppressed;
                if (log) log->push_back({c.time, res.mover_site, res.y, res.accepted});
                te = c.time;
                return true;
            },
            [&](std::size_t g, double gam, double cv, int occ0) {
                st.gamma[r * G + g] = gam;
                st.cov[r * G + g] = cv;
                st.density[r * G + g] = occ0;
            });
    });
    std::uint64_t att = 0, sup = 0;
    for (const auto& sr : runs) att += sr.attempts, sup += sr.suppressed;
    st.attempts = att;
    st.suppressed_fraction = att ? static_cast<double>(sup) / static_cast<double>(att) : 0.0;
    if (auto w = spread_warning(k, L, t_grid.back()); !w.empty()) st.warnings.push_back(w);
    return st;
}

std::vector<double> replay_occupation(LatticeConfig c, const std::vector<EventRecord>& events,
                                      const FunctionalSpec& f, const std::vector<double>& t_grid) {
    check_grid(t_grid);
    std::vector<double> out(t_grid.size(), 0.0);
    std::size_t e = 0;
    occupation_loop(
        c, f, t_grid,
        [&](double& te) {
            if (e >= events.size()) return false;
            const EventRecord& ev = events[e++];
            if (ev.accepted) c.move_particle(ev.mover_site, c.shift(ev.mover_site, ev.y));
            c.time = ev.time;
            te = ev.time;
            return true;
        },
        [&](std::size_t g, double gam, double, int) { out[g] = gam; });
    return out;
}

namespace {

// Site-averaged (eta_s(x) - rho)(eta_0(x) - rho) per plain replica, replica-major.
std::vector<double> plain_site_covariance(const JumpKernel& k, int L, double rho, const std::vector<double>& s_grid,
                                          std::size_t n_plain, std::uint64_t seed, int threads) {
    const std::size_t G = s_grid.size();
    std::vector<double> plain(n_plain * G, 0.0);
    parallel_for(n_plain, threads, [&](std::size_t r) {
        Rng rng(seed + r);
        LatticeConfig c = init_bernoulli(L, k.dim(), rho, rng);
        const std::vector<std::uint8_t> eta0 = c.occ;
        const bool frozen = c.particles.empty() || c.particles.size() == c.sites();
        const double inv_sites = 1.0 / static_cast<double>(c.sites());
        double acc = 0.0;
        for (std::size_t x = 0; x < c.sites(); ++x) acc += (c.occ[x] - rho) * (eta0[x] - rho);
        std::size_t g = 0;
        while (g < G) {
            if (frozen) {
                while (g < G) plain[r * G + g++] = acc * inv_sites;
                break;
            }
            const double t0 = c.time;
            StepResult res = step(c, k, rng);
            while (g < G && s_grid[g] < t0 + res.dwell) plain[r * G + g++] = acc * inv_sites;
            if (res.accepted) {
                const std::int32_t to = c.shift(res.mover_site, res.y);
                acc += (eta0[to] - rho) - (eta0[res.mover_site] - rho);
            }
        }
    });
    return plain;
}

// Coupled runs started from nu_rho with the second-class particle at the origin.
struct CoupledSamples {
    std::vector<double> at_start;  // second-class particle at the origin
    std::vector<double> lower;     // eta_s(0), first-class only
};

CoupledSamples coupled_origin_samples(const JumpKernel& k, int L, double rho, const std::vector<double>& s_grid,
                                      std::size_t n, std::uint64_t seed, int threads) {
    const std::size_t G = s_grid.size();
    CoupledSamples out{std::vector<double>(n * G, 0.0), std::vector<double>(n * G, 0.0)};
    parallel_for(n, threads, [&](std::size_t r) {
        Rng rng(seed + r);
        LatticeConfig c = init_bernoulli(L, k.dim(), rho, rng);
        place_second_class_at_origin(c);
        std::size_t g = 0;
        while (g < G) {
            const double hit = *c.second_class == 0 ? 1.0 : 0.0, low = c.occ[0];
            const double t0 = c.time;
            StepResult res = step_coupled(c, k, rng);
            while (g < G && s_grid[g] < t0 + res.dwell) {
                out.at_start[r * G + g] = hit;
                out.lower[r * G + g] = low;
                ++g;
            }
        }
    });
    return out;
}

}  // namespace

CouplingReport covariance_identity_check(const JumpKernel& k, int L, double rho, const std::vector<double>& s_grid,
                                         std::size_t n_replicas, std::uint64_t seed, const CouplingOptions& opt) {
    check_grid(s_grid);
    if (n_replicas < 16) throw Error(ErrorCode::TooFewReplicas, "need at least 16 coupled replicas");
    const std::size_t n_plain = opt.plain_replicas ? opt.plain_replicas : std::max<std::size_t>(n_replicas / 8, 2);
    const std::size_t G = s_grid.size();
    const double chi = rho * (1.0 - rho);

    const std::vector<double> plain = plain_site_covariance(k, L, rho, s_grid, n_plain, seed, opt.threads);
    const CoupledSamples coupled = coupled_origin_samples(k, L, rho, s_grid, n_replicas, seed + n_plain, opt.threads);
    const std::vector<double>& hits = coupled.at_start;

    CouplingReport rep;
    for (std::size_t g = 0; g < G; ++g) {
        CouplingRow row;
        row.s = s_grid[g];
        row.cov = mean_se(plain, G, g, n_plain);
        Estimate p0 = mean_se(hits, G, g, n_replicas);
        row.chi_p0 = {chi * p0.value, chi * p0.se};
        double se = std::hypot(row.cov.se, row.chi_p0.se);
        double diff = row.cov.value - row.chi_p0.value;
        row.z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : INFINITY);
        rep.rows.push_back(row);
    }
    if (auto w = spread_warning(k, L, s_grid.back()); !w.empty()) rep.warnings.push_back(w);
    return rep;
}

std::vector<MarginalRow> coupled_marginal_check(const JumpKernel& k, int L, double rho,
                                               const std::vector<double>& s_grid, std::size_t n_replicas,
                                               std::uint64_t seed, const CouplingOptions& opt) {
    check_grid(s_grid);
    if (n_replicas < 16) throw Error(ErrorCode::TooFewReplicas, "need at least 16 coupled replicas");
    const std::size_t n_plain = opt.plain_replicas ? opt.plain_replicas : std::max<std::size_t>(n_replicas / 8, 2);
    const std::size_t G = s_grid.size();
    const std::vector<double> plain = plain_site_covariance(k, L, rho, s_grid, n_plain, seed, opt.threads);
    const CoupledSamples coupled = coupled_origin_samples(k, L, rho, s_grid, n_replicas, seed + n_plain, opt.threads);
    std::vector<double> upper(coupled.lower.size());
    for (std::size_t i = 0; i < upper.size(); ++i) upper[i] = coupled.lower[i] + coupled.at_start[i];
    std::vector<MarginalRow> out;
    for (std::size_t g = 0; g < G; ++g) {
        MarginalRow row;
        row.s = s_grid[g];
        const Estimate cov = mean_se(plain, G, g, n_plain);
        row.upper = mean_se(upper, G, g, n_replicas);
        row.lower = mean_se(coupled.lower, G, g, n_replicas);
        row.upper_pred = {rho + cov.value / rho, cov.se / rho};
        row.lower_pred = {rho - cov.value / (1.0 - rho), cov.se / (1.0 - rho)};
        auto z = [](const Estimate& a, const Estimate& b) {
            const double se = std::hypot(a.se, b.se), d = a.value - b.value;
            return se > 0.0 ? d / se : (d == 0.0 ? 0.0 : INFINITY);
        };
        row.z_upper = z(row.upper, row.upper_pred);
        row.z_lower = z(row.lower, row.lower_pred);
        out.push_back(row);
    }
    return out;
}

SecondClassMoments second_class_moments(const JumpKernel& k, int L, double rho, const std::vector<double>& t_grid,
                                        std::size_t n_replicas, std::uint64_t seed, int threads) {
    check_grid(t_grid);
    if (n_replicas < 2) throw Error(ErrorCode::TooFewReplicas, "need at least 2 replicas");
    const std::size_t G = t_grid.size();
    std::vector<double> xs(n_replicas * G), sq(n_replicas * G);
    parallel_for(n_replicas, threads, [&](std::size_t r) {
        Rng rng(seed + r);
        LatticeConfig c = init_bernoulli(L, k.dim(), rho, rng);
        place_second_class_at_origin(c);
        std::size_t g = 0;
        while (g < G) {
            auto d = c.second_class_disp;
            double t0 = c.time;
            StepResult res = step_coupled(c, k, rng);
            while (g < G && t_grid[g] < t0 + res.dwell) {
                xs[r * G + g] = static_cast<double>(d[0]);
                sq[r * G + g] = static_cast<double>(d[0]) * d[0] + static_cast<double>(d[1]) * d[1];
                ++g;
            }
        }
    });
    SecondClassMoments out;
    out.t_grid = t_grid;
    for (std::size_t g = 0; g < G; ++g) {
        out.mean_x.push_back(mean_se(xs, G, g, n_replicas));
        out.mean_sq.push_back(mean_se(sq, G, g, n_replicas));
    }
    return out;
}

}  // namespace lrex
