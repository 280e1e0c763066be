#pragma once

#include <limits>
#include <string>
#include <vector>

namespace lrex {

/// Multiplicative correction m(x) in y = C x^beta m(x); the fit regresses log(y / m(x)).
enum class Correction {
    None,     // m = 1
    Log,      // m = |log x|
    SqrtLog,  // m = |log x|^{-1/2}
    LogLog,   // m = log |log x|
};

const char* to_string(Correction c);
Correction parse_correction(const std::string& s);

struct FitOptions {
    Correction correction = Correction::None;
    double x_lo = 0.0, x_hi = std::numeric_limits<double>::infinity();
    bool auto_window = true;
    std::size_t min_points = 5;
};

struct ScalingFit {
    std::vector<double> x, y, y_err;  // points inside the chosen window
    double beta = 0.0, beta_se = 0.0, intercept = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    Correction correction = Correction::None;
    std::vector<double> residuals;  // log-scale, standardized when y_err is given
    double chi2_dof = 0.0;
    double runs_z = 0.0;  // Wald-Wolfowitz runs statistic of the residual signs
    bool white = false;   // |runs_z| < 2 and, with errors, chi2_dof consistent with 1
};

/// Weighted least squares of log(y / m(x)) on log x with weights (y / y_err)^2,
/// unit weights when y_err is empty or all zero. With auto_window the widest
/// log-span window of >= min_points contiguous points whose residuals are white is
/// chosen, falling back to every point in [x_lo, x_hi]. beta_se is inflated by
/// sqrt(chi2_dof) when that exceeds 1. Slopes are invariant under y -> 2^k y.
/// Throws InsufficientPoints, NonPositiveData, BadInterval.
ScalingFit fit_exponent(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& y_err, const FitOptions& opt = {});

struct FitReportRow {
    std::string quantity;
    double alpha = 0.0;
    int dim = 1;
    double rho = 0.5;
    ScalingFit fit;
    double target_beta = 0.0, tolerance = 0.0;
    bool pass() const;
};

std::string fit_report_csv(const std::vector<FitReportRow>& rows);

}  // namespace lrex
