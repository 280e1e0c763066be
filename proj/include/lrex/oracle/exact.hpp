#pragma once

#include "lrex/kernel/jump_kernel.hpp"
#include "lrex/sim/occupation.hpp"

#include <Eigen/Sparse>
#include <string>
#include <vector>

namespace lrex {

/// Full generator of the exclusion process on the ring Z/L over all 2^L
/// occupancies. Bit x of a state index is eta(x).
struct ExactSystem {
    int L = 0;
    double rho = 0.5;
    double alpha = 0.0;
    Variant variant = Variant::SYM;
    Eigen::SparseMatrix<double, Eigen::RowMajor> Q;  // rows sum to 0
    Eigen::VectorXd f;                               // observable per state; may be overwritten
    Eigen::VectorXd pi;                              // product Bernoulli(rho)
    double max_exit_rate = 0.0;

    std::size_t states() const { return static_cast<std::size_t>(pi.size()); }
    /// <g, h>_pi
    double inner(const Eigen::VectorXd& g, const Eigen::VectorXd& h) const { return (g.array() * h.array() * pi.array()).sum(); }
};

/// Jump rates are folded onto the ring: rate(x -> x + z) = sum of p(y) over y = z mod L.
/// Throws StateSpaceTooLarge for L > 12, BadSize for L < 2 or a d = 2 kernel.
ExactSystem build_exact(const JumpKernel& k, int L, double rho, const FunctionalSpec& f = {});

/// Folded jump rate to offset z in [1, L).
std::vector<double> ring_rates(const JumpKernel& k, int L);

/// max_x |(pi Q)_x|
double stationarity_residual(const ExactSystem& s);
/// max |pi_i Q_ij - pi_j Q_ji|
double reversibility_defect(const ExactSystem& s);

struct ExactValue {
    double value = 0.0, err_bound = 0.0;
};

/// sigma_t^2 = 2 int_0^t (t - s) <f, T_s f>_pi ds, one value per grid time.
/// Pre: times strictly increasing and positive. Throws QuadratureFail.
std::vector<ExactValue> exact_variance_curve(const ExactSystem& s, const std::vector<double>& times);
ExactValue exact_variance(const ExactSystem& s, double t);

/// Same quantity by diagonalizing the symmetrized generator. Throws NotSymmetric
/// unless D_pi Q is symmetric.
std::vector<double> exact_variance_eigen(const ExactSystem& s, const std::vector<double>& times);

/// 2 lambda^{-2} <f, (lambda - Q)^{-1} f>_pi by sparse LU. Throws SingularSolve.
double exact_resolvent(const ExactSystem& s, double lambda);

/// int_0^inf e^{-lambda t} sigma_t^2 dt from the time-domain curve.
ExactValue exact_laplace_time_domain(const ExactSystem& s, double lambda);

struct OracleRow {
    double t_or_lambda, value, err_bound;
};
std::string oracle_csv(const ExactSystem& s, const std::vector<OracleRow>& rows);

}  // namespace lrex
