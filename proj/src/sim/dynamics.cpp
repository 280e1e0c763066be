#include "lrex/error.hpp"
#include "lrex/sim/lattice.hpp"

#include <cmath>

namespace lrex {

std::int32_t LatticeConfig::shift(std::int32_t site, const Disp& y) const {
    const int L = side;
    auto wrap = [L](long v) { return static_cast<int>(((v % L) + L) % L); };
    if (dim == 1) return wrap(static_cast<long>(site) + y[0]);
    int x0 = site % L, x1 = site / L;
    return wrap(static_cast<long>(x0) + y[0]) + L * wrap(static_cast<long>(x1) + y[1]);
}

void LatticeConfig::move_particle(std::int32_t from, std::int32_t to) {
    std::int32_t idx = slot[from];
    particles[idx] = to;
    slot[to] = idx;
    slot[from] = -1;
    occ[from] = 0;
    occ[to] = 1;
}

void LatticeConfig::remove_particle(std::int32_t site) {
    std::int32_t idx = slot[site];
    if (idx < 0) return;
    std::int32_t last = particles.back();
    particles[idx] = last;
    slot[last] = idx;
    particles.pop_back();
    slot[site] = -1;
    occ[site] = 0;
}

bool LatticeConfig::consistent() const {
    std::size_t count = 0;
    for (std::size_t x = 0; x < occ.size(); ++x) {
        if (occ[x]) {
            ++count;
            if (slot[x] < 0 || particles[slot[x]] != static_cast<std::int32_t>(x)) return false;
        } else if (slot[x] != -1) {
            return false;
        }
    }
    if (second_class && occ[*second_class]) return false;
    return count == particles.size();
}

LatticeConfig init_bernoulli(int L, int dim, double rho, Rng& rng) {
    if (L < 4 || L % 2 != 0) throw Error(ErrorCode::BadSize, "L must be even and >= 4");
    if (dim != 1 && dim != 2) throw Error(ErrorCode::BadSize, "dim must be 1 or 2");
    if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorCode::BadDensity, "rho must lie in (0, 1)");
    LatticeConfig c;
    c.side = L;
    c.dim = dim;
    const std::size_t n = dim == 1 ? static_cast<std::size_t>(L) : static_cast<std::size_t>(L) * L;
    c.occ.assign(n, 0);
    c.slot.assign(n, -1);
    for (std::size_t x = 0; x < n; ++x) {
        if (uniform01(rng) < rho) {
            c.occ[x] = 1;
            c.slot[x] = static_cast<std::int32_t>(c.particles.size());
            c.particles.push_back(static_cast<std::int32_t>(x));
        }
    }
    return c;
}

LatticeConfig init_bernoulli(int L, int dim, double rho, std::uint64_t seed) {
    Rng rng(seed);
    return init_bernoulli(L, dim, rho, rng);
}

void place_second_class_at_origin(LatticeConfig& c) {
    c.remove_particle(0);
    c.second_class = 0;
    c.second_class_disp = {0, 0};
}

namespace {

std::size_t uniform_index(Rng& rng, std::size_t n) {
    auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    return i < n ? i : n - 1;
}

double exp_draw(Rng& rng, double rate) { return -std::log1p(-uniform01(rng)) / rate; }

}  // namespace

StepResult step(LatticeConfig& c, const JumpKernel& k, Rng& rng) {
    const std::size_t n = c.particles.size();
    if (n == 0 || n == c.sites()) throw Error(ErrorCode::NoParticle, "no move is possible on an empty or full lattice");
    StepResult r;
    r.dwell = exp_draw(rng, static_cast<double>(n));
    r.mover_site = c.particles[uniform_index(rng, n)];
    r.y = k.sample(rng);
    std::int32_t target = c.shift(r.mover_site, r.y);
    if (!c.occ[target]) {
        c.move_particle(r.mover_site, target);
        r.accepted = true;
    }
    c.time += r.dwell;
    return r;
}

StepResult step_coupled(LatticeConfig& c, const JumpKernel& k, Rng& rng) {
    if (!c.second_class) throw Error(ErrorCode::NoParticle, "step_coupled needs a second-class particle");
    const std::size_t n = c.particles.size();
    StepResult r;
    r.dwell = exp_draw(rng, static_cast<double>(n + 1));
    std::size_t j = uniform_index(rng, n + 1);
    r.y = k.sample(rng);
    const std::int32_t R = *c.second_class;
    if (j == n) {
        r.mover_site = R;
        std::int32_t target = c.shift(R, r.y);
        if (!c.occ[target] && target != R) {
            c.second_class = target;
            c.second_class_disp[0] += r.y[0];
            c.second_class_disp[1] += r.y[1];
            r.accepted = r.second_class_moved = true;
        }
    } else {
        r.mover_site = c.particles[j];
        std::int32_t target = c.shift(r.mover_site, r.y);
        if (target == R) {
            // First-class particle lands on the discrepancy: they exchange sites.
            c.move_particle(r.mover_site, target);
            c.second_class = r.mover_site;
            c.second_class_disp[0] -= r.y[0];
            c.second_class_disp[1] -= r.y[1];
            r.accepted = r.second_class_moved = true;
        } else if (!c.occ[target]) {
            c.move_particle(r.mover_site, target);
            r.accepted = true;
        }
    }
    c.time += r.dwell;
    return r;
}

}  // namespace lrex
