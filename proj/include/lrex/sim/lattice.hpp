#pragma once

#include "lrex/kernel/jump_kernel.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace lrex {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Occupancy eta on the torus (Z/LZ)^d, particle index, optional second-class site.
struct LatticeConfig {
    int side = 0;
    int dim = 1;
    std::vector<std::uint8_t> occ;         // eta(x) in {0, 1}
    std::vector<std::int32_t> particles;   // occupied sites
    std::vector<std::int32_t> slot;        // site -> index into particles, -1 when empty
    std::optional<std::int32_t> second_class;
    std::array<long, 2> second_class_disp{0, 0};  // unwrapped displacement since start
    double time = 0.0;

    std::size_t sites() const { return occ.size(); }
    std::int32_t shift(std::int32_t site, const Disp& y) const;
    void move_particle(std::int32_t from, std::int32_t to);
    void remove_particle(std::int32_t site);
    /// True when particles, slot and occ agree.
    bool consistent() const;
};

LatticeConfig init_bernoulli(int L, int dim, double rho, std::uint64_t seed);
LatticeConfig init_bernoulli(int L, int dim, double rho, Rng& rng);

/// Empty the origin and place the second-class particle there.
void place_second_class_at_origin(LatticeConfig& c);

struct StepResult {
    double dwell = 0.0;
    std::int32_t mover_site = -1;  // site of the chosen particle before the attempt
    Disp y{0, 0};
    bool accepted = false;
    bool second_class_moved = false;
};

/// One attempt: dwell ~ Exp(#particles), uniform particle, y ~ p; blocked targets suppress the move.
StepResult step(LatticeConfig& c, const JumpKernel& k, Rng& rng);

/// Basic coupling with a single discrepancy: N first-class clocks plus one for the second-class particle.
StepResult step_coupled(LatticeConfig& c, const JumpKernel& k, Rng& rng);

}  // namespace lrex
