#pragma once

#include <string>
#include <vector>

namespace lrex {

struct Curve {
    std::vector<double> x, y;
};

struct TauberianRow {
    double lambda = 0.0;
    double laplace = 0.0;       // supplied
    double from_variance = 0.0; // int e^{-lambda t} sigma_t^2 dt
    double rel_dev = 0.0;
    double tauber_ratio = 0.0;  // t^{-1} L(1/t) / sigma_t^2 at t = 1/lambda, NaN off the t-grid
};

struct TauberianReport {
    std::vector<TauberianRow> rows;
    double max_rel_dev = 0.0;
};

/// Integrates a makima spline of log sigma_t^2 against log t, extended beyond the
/// grid by power laws through the two end points on each side (incomplete gamma).
/// Throws GridMismatch when either extension carries more than 1% of the integral,
/// NonPositiveData, InsufficientPoints (fewer than 4 t-points).
TauberianReport tauberian_check(const Curve& variance, const Curve& laplace);

std::string tauberian_csv(const TauberianReport& r);

}  // namespace lrex
