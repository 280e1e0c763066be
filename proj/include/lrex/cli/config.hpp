#pragma once

#include "lrex/analysis/fit.hpp"
#include "lrex/kernel/fourier.hpp"
#include "lrex/kernel/jump_kernel.hpp"
#include "lrex/sim/occupation.hpp"
#include "lrex/spectral/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lrex {

enum class Mode { Simulate, Exact, Quadrature, Fit, SecondClass, VerifyAll };
const char* to_string(Mode m);
Mode parse_mode(const std::string& s);  // accepts verify_all and verify-all

/// Fully resolved experiment. Field names mirror the config keys "section.key".
struct ExperimentConfig {
    Mode mode = Mode::Quadrature;

    // [run]
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    int threads = 1;
    std::size_t n_replicas = 1000;
    std::size_t plain_replicas = 0;

    // [kernel]
    int dim = 1;
    double alpha = 1.5;
    Variant variant = Variant::SYM;
    std::vector<double> b_plus{1.0}, b_minus{1.0};
    int trunc_radius = 256;
    int asym_radius = 2;
    int fr_radius = 0;

    // [lattice]
    int L = 64;
    double rho = 0.5;

    // [functional]
    FunctionalSpec::Kind kind = FunctionalSpec::Kind::Degree1;
    int x0 = 0, x1 = 1;

    // [grid]
    std::vector<double> t{1.0, 2.0, 5.0};
    std::vector<double> lambda{0.1, 0.5, 2.0};
    std::vector<double> s{0.5, 1.0, 2.0};

    // [quadrature]
    Target target = Target::VarianceT;
    double delta = 0.05, u = 0.01;
    RKind r_kind = RKind::S0;
    std::vector<double> b_bar{1.0, 1.0};
    int order = 12;
    double abs_tol = 1e-12, rel_tol = 1e-6, singular_pad = 0.05;
    int outer_grid = 64;
    std::vector<int> site{0, 0};

    // [fit]
    std::string input;
    std::string x_column = "t", y_column = "var_gamma", err_column;
    Correction correction = Correction::None;
    std::string quantity = "variance";
    double target_beta = 0.0, tolerance = 0.05;
    double x_lo = 0.0, x_hi = 0.0;  // x_hi = 0: no upper limit
    bool auto_window = true;

    // [verify]
    std::vector<int> criteria;  // empty: all

    /// Keys left at their default, in registry order.
    std::vector<std::string> defaulted;
};

/// Line-based key=value text with '#' comments and [section] headers. A key is
/// "section.key", a bare key inside its section, or at top level a bare key whose
/// name is unique across sections. The [manifest] section is informational and skipped.
/// Throws ParseError (with line number) on malformed lines, ValidationError naming
/// the field on unknown keys, bad values, or a missing seed for stochastic modes.
/// `overrides` (qualified or unique bare keys) are applied after the text and win.
using Overrides = std::vector<std::pair<std::string, std::string>>;
ExperimentConfig parse_config(const std::string& text, const Overrides& overrides = {});

/// Cross-field checks; parse_config calls it. Throws ValidationError.
void validate(const ExperimentConfig& c);

/// Every key with its resolved value, in registry order, grouped by section.
std::string resolved_config_text(const ExperimentConfig& c);

/// resolved_config_text followed by a [manifest] block (code version, creation
/// time, defaulted keys). Parsing a manifest reproduces the config.
std::string manifest_text(const ExperimentConfig& c, const std::string& created);

/// All registered keys, qualified.
std::vector<std::string> config_keys();

const char* code_version();

}  // namespace lrex
