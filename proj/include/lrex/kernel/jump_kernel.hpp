#pragma once

#include "lrex/kernel/alias_table.hpp"

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace lrex {

enum class Variant { LA, SA, NNA, MZA, FR, SYM };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

using Disp = std::array<int, 2>;  // second component unused in d = 1

/// Knobs that only some variants read.
struct KernelOptions {
    int asym_radius = 2;  // SA: antisymmetric part supported on |y|_inf <= asym_radius
    int fr_radius = 0;    // FR: support radius; 0 means trunc_radius
};

/// Long-range jump law p(y) = c * gamma(y) / |y|^{d+alpha}, truncated to
/// |y_i| <= trunc_radius and renormalized. Immutable after construction.
class JumpKernel {
public:
    int dim() const { return dim_; }
    double alpha() const { return alpha_; }
    const std::vector<double>& b_plus() const { return b_plus_; }
    const std::vector<double>& b_minus() const { return b_minus_; }
    Variant variant() const { return variant_; }
    double c_norm() const { return c_norm_; }
    int trunc_radius() const { return trunc_radius_; }
    const KernelOptions& options() const { return options_; }

    const std::vector<Disp>& displacements() const { return disp_; }
    const std::vector<double>& probabilities() const { return prob_; }

    /// p(y); zero outside the table.
    double p(const Disp& y) const;
    double s(const Disp& y) const { return 0.5 * (p(y) + p({-y[0], -y[1]})); }
    double a(const Disp& y) const { return 0.5 * (p(y) - p({-y[0], -y[1]})); }

    /// Mean displacement m = sum_y y p(y).
    std::array<double, 2> mean() const;

    /// Symmetrized kernel (b^+ and b^- replaced by their average, variant SYM).
    JumpKernel symmetrized() const;

    template <class Rng>
    Disp sample(Rng& rng) const {
        return disp_[alias_.sample(rng)];
    }

    /// Average weight (b_i^+ + b_i^-)/2 on axis i.
    double b_bar(int i) const { return 0.5 * (b_plus_[i] + b_minus_[i]); }

    friend JumpKernel build_kernel(int, double, std::vector<double>, std::vector<double>, Variant,
                                   int, KernelOptions);

private:
    JumpKernel() = default;
    std::size_t index_of(const Disp& y) const;

    int dim_ = 1;
    double alpha_ = 1.0;
    std::vector<double> b_plus_, b_minus_;
    Variant variant_ = Variant::SYM;
    double c_norm_ = 0.0;
    int trunc_radius_ = 1;
    KernelOptions options_;
    std::vector<Disp> disp_;
    std::vector<double> prob_;
    AliasTable alias_;
};

/// Throws lrex::Error (BadAlpha, BadWeights, BadVariant, NonIrreducible).
JumpKernel build_kernel(int dim, double alpha, std::vector<double> b_plus, std::vector<double> b_minus,
                        Variant variant, int trunc_radius, KernelOptions options = {});

/// Flat key=value block: dim, alpha, b_plus, b_minus, variant, trunc_radius (+ asym_radius, fr_radius).
std::string serialize(const JumpKernel& k);
JumpKernel deserialize_kernel(const std::string& text);

/// CSV rows y[,y2],p,s,a for every tabled displacement.
std::string table_csv(const JumpKernel& k);

}  // namespace lrex
