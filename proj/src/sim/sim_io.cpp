#include "lrex/sim/occupation.hpp"

#include <cstdio>
#include <string>

namespace lrex {

namespace {

void append(std::string& out, const char* fmt, auto... args) {
    char buf[256];
    int n = std::snprintf(buf, sizeof buf, fmt, args...);
    out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

std::string stats_csv(const ReplicaStats& s) {
    std::string out = "t,var_gamma,stderr,n,mean_gamma,mean_gamma_se,cov,cov_se,occ_x0,occ_x0_se\n";
    for (std::size_t g = 0; g < s.grid_size(); ++g) {
        Estimate m = s.mean_gamma(g), v = s.var_gamma(g), c = s.mean_cov(g), d = s.mean_density(g);
        append(out, "%.17g,%.17g,%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t_grid[g], v.value, v.se, s.n(),
               m.value, m.se, c.value, c.se, d.value, d.se);
    }
    return out;
}

std::string coupling_csv(const CouplingReport& r) {
    std::string out = "s,cov_hat,cov_se,chi_p0_hat,chi_p0_se,z\n";
    for (const auto& row : r.rows)
        append(out, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.s, row.cov.value, row.cov.se, row.chi_p0.value,
               row.chi_p0.se, row.z);
    return out;
}

std::string event_log_csv(const std::vector<EventRecord>& log) {
    // Displacement is written as y1;y2 (y2 = 0 in one dimension).
    std::string out = "time,mover_site,displacement,accepted\n";
    for (const auto& e : log)
        append(out, "%.17g,%d,%d;%d,%d\n", e.time, e.mover_site, e.y[0], e.y[1], e.accepted ? 1 : 0);
    return out;
}

}  // namespace lrex
