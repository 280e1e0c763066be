#pragma once

#include "lrex/sim/lattice.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lrex {

/// Centered local observable: eta(x0) - rho, or (eta(x0) - rho)(eta(x1) - rho).
struct FunctionalSpec {
    enum class Kind { Degree1, Degree2 } kind = Kind::Degree1;
    std::int32_t x0 = 0, x1 = 1;
    double rho = 0.5;

    double value(const LatticeConfig& c) const {
        double v = c.occ[x0] - rho;
        return kind == Kind::Degree1 ? v : v * (c.occ[x1] - rho);
    }
};

struct Estimate {
    double value = 0.0, se = 0.0;
};

/// Per-replica samples at the grid times. Samples are keyed by replica index so
/// merging is order-independent.
struct ReplicaStats {
    std::vector<double> t_grid;
    std::vector<std::uint64_t> replica_ids;
    std::vector<double> gamma;    // [replica][grid], row-major
    std::vector<double> cov;      // f(eta_t) f(eta_0)
    std::vector<double> density;  // eta_t(x0), for the stationarity check
    std::vector<std::string> warnings;
    double suppressed_fraction = 0.0;
    std::uint64_t attempts = 0;

    std::size_t n() const { return replica_ids.size(); }
    std::size_t grid_size() const { return t_grid.size(); }
    double gamma_at(std::size_t replica, std::size_t g) const { return gamma[replica * grid_size() + g]; }

    Estimate mean_gamma(std::size_t g) const;
    /// Sample variance with the standard error of the variance estimator.
    Estimate var_gamma(std::size_t g) const;
    Estimate mean_cov(std::size_t g) const;
    Estimate mean_density(std::size_t g) const;

    /// Union of two disjoint replica sets; result sorted by replica id.
    void merge(const ReplicaStats& other);
};

struct EventRecord {
    double time;
    std::int32_t mover_site;
    Disp y;
    bool accepted;
};

struct OccupationOptions {
    int threads = 1;
    std::vector<EventRecord>* event_log = nullptr;  // filled for replica 0 only
};

/// Pre: t_grid strictly increasing and positive, n_replicas >= 2.
ReplicaStats run_occupation(const JumpKernel& k, int L, double rho, const std::vector<double>& t_grid,
                            std::size_t n_replicas, const FunctionalSpec& f, std::uint64_t seed,
                            const OccupationOptions& opt = {});

/// Gamma_f at the grid times, recomputed from a starting configuration and its event log.
std::vector<double> replay_occupation(LatticeConfig start, const std::vector<EventRecord>& events,
                                      const FunctionalSpec& f, const std::vector<double>& t_grid);

struct CouplingRow {
    double s = 0.0;
    Estimate cov;      // E[f(eta_s) f(eta_0)] from plain runs (site-averaged)
    Estimate chi_p0;   // chi(rho) P(R_s = start) from coupled runs
    double z = 0.0;
};

struct CouplingReport {
    std::vector<CouplingRow> rows;
    std::vector<std::string> warnings;
};

struct CouplingOptions {
    std::size_t plain_replicas = 0;  // 0: n_replicas / 8 (site averaging shrinks the variance)
    int threads = 1;
};

CouplingReport covariance_identity_check(const JumpKernel& k, int L, double rho, const std::vector<double>& s_grid,
                                         std::size_t n_replicas, std::uint64_t seed,
                                         const CouplingOptions& opt = {});

/// Each marginal of the basic coupling is an exclusion process. Started from nu_rho
/// with the origin occupied (upper) or empty (lower), the origin occupancy at time s
/// must match the plain process: rho + C(s)/rho and rho - C(s)/(1 - rho), with C the
/// plain site-averaged covariance. Seeds as in covariance_identity_check.
struct MarginalRow {
    double s = 0.0;
    Estimate upper, lower, upper_pred, lower_pred;
    double z_upper = 0.0, z_lower = 0.0;
};
std::vector<MarginalRow> coupled_marginal_check(const JumpKernel& k, int L, double rho,
                                               const std::vector<double>& s_grid, std::size_t n_replicas,
                                               std::uint64_t seed, const CouplingOptions& opt = {});

/// Second moment of the second-class displacement at the grid times (coupled runs from nu_rho).
struct SecondClassMoments {
    std::vector<double> t_grid;
    std::vector<Estimate> mean_x;   // first coordinate
    std::vector<Estimate> mean_sq;  // |R_t|^2
};
SecondClassMoments second_class_moments(const JumpKernel& k, int L, double rho, const std::vector<double>& t_grid,
                                        std::size_t n_replicas, std::uint64_t seed, int threads = 1);

std::string stats_csv(const ReplicaStats& s);
std::string coupling_csv(const CouplingReport& r);
std::string event_log_csv(const std::vector<EventRecord>& log);

/// Runs fn(i) for i in [0, n) over up to `threads` workers; each index runs exactly once.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace lrex
