#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace lrex {

struct HurstTarget {
    double H = 0.5;
    /// d = 1, alpha >= 2: degree-2 observables only have a one-time Gaussian limit.
    bool degree2_one_time_only = false;
    std::string branch;
};

/// Hurst index of the degree-1 occupation-time limit.
HurstTarget hurst_target(double alpha, int dim);

/// 1/2 (s^{2H} + t^{2H} - |t - s|^{2H})
double fbm_covariance(double s, double t, double H);

/// Replica-major paths: paths[r * times.size() + i] is sample r at times[i].
struct PathSet {
    std::vector<double> times;
    std::vector<double> values;
    std::size_t n() const { return times.empty() ? 0 : values.size() / times.size(); }
    double at(std::size_t r, std::size_t i) const { return values[r * times.size() + i]; }
};

/// Exact samples of B_H at the given times via the Cholesky factor of the covariance.
PathSet synthetic_fbm(const std::vector<double>& times, double H, std::size_t n, std::mt19937_64& rng);
/// Brownian paths from independent Gaussian increments.
PathSet synthetic_brownian(const std::vector<double>& times, std::size_t n, std::mt19937_64& rng);

struct FbmTest {
    double H = 0.5;
    std::vector<double> times;
    std::size_t n_replicas = 0;
    std::size_t ref_index = 0;           // time used to normalize the variance
    std::vector<double> empirical;      // row-major, times x times
    std::vector<double> theory;
    std::vector<double> z;              // zero on the reference diagonal entry
    double max_abs_z = 0.0;
    double max_abs_z_offdiag = 0.0;
    double min_eigen_empirical = 0.0;   // PSD diagnostic
};

/// Empirical covariance of the paths, rescaled so the entry at the time nearest 1
/// (in log) equals its target ref^{2H}, against fbm_covariance. z uses the
/// delta-method standard error of the ratio estimator.
/// Pre: >= 1000 replicas, >= 4 positive times; throws TooFewReplicas, BadInterval.
FbmTest fbm_covariance_test(const PathSet& paths, double H);

std::string fbm_csv(const FbmTest& t);

}  // namespace lrex
