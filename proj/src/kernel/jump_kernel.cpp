#include "lrex/kernel/jump_kernel.hpp"

#include "lrex/error.hpp"
#include "lrex/kernel/compensated.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace lrex {

const char* to_string(ErrorCode c) noexcept {
    switch (c) {
        case ErrorCode::BadAlpha: return "BadAlpha";
        case ErrorCode::BadWeights: return "BadWeights";
        case ErrorCode::BadVariant: return "BadVariant";
        case ErrorCode::NonIrreducible: return "NonIrreducible";
        case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
        case ErrorCode::TailNotConverged: return "TailNotConverged";
        case ErrorCode::BadSize: return "BadSize";
        case ErrorCode::BadDensity: return "BadDensity";
        case ErrorCode::BadInterval: return "BadInterval";
        case ErrorCode::NoParticle: return "EmptyOrFull";
        case ErrorCode::StateSpaceTooLarge: return "TooLarge";
        case ErrorCode::SingularSolve: return "SolveFail";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::QuadratureFail: return "QuadratureFail";
        case ErrorCode::InnerGridTooCoarse: return "InnerGridTooCoarse";
        case ErrorCode::BoundViolated: return "BoundViolated";
        case ErrorCode::InsufficientPoints: return "InsufficientPoints";
        case ErrorCode::NonPositiveData: return "NonPositiveData";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::TooFewReplicas: return "TooFewReplicas";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

const char* to_string(Variant v) {
    switch (v) {
        case Variant::LA: return "LA";
        case Variant::SA: return "SA";
        case Variant::NNA: return "NNA";
        case Variant::MZA: return "MZA";
        case Variant::FR: return "FR";
        case Variant::SYM: return "SYM";
    }
    return "?";
}

Variant parse_variant(const std::string& s) {
    for (Variant v : {Variant::LA, Variant::SA, Variant::NNA, Variant::MZA, Variant::FR, Variant::SYM})
        if (s == to_string(v)) return v;
    throw Error(ErrorCode::BadVariant, "unknown variant '" + s + "'");
}

namespace {

double norm(const Disp& y, int dim) {
    if (dim == 1) return std::abs(y[0]);
    return std::hypot(static_cast<double>(y[0]), static_cast<double>(y[1]));
}

int norm_inf(const Disp& y) { return std::max(std::abs(y[0]), std::abs(y[1])); }

// Direction weight gamma(y) / c with per-axis weights bp, bm.
double gamma_weight(const Disp& y, int dim, const std::vector<double>& bp, const std::vector<double>& bm) {
    double g = 0.0;
    for (int i = 0; i < dim; ++i) {
        if (y[i] > 0) g += bp[i];
        if (y[i] < 0) g += bm[i];
    }
    return g;
}

}  // namespace

JumpKernel build_kernel(int dim, double alpha, std::vector<double> b_plus, std::vector<double> b_minus,
                        Variant variant, int trunc_radius, KernelOptions options) {
    if (dim != 1 && dim != 2) throw Error(ErrorCode::BadSize, "dim must be 1 or 2");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::BadAlpha, "alpha must be positive");
    if (static_cast<int>(b_plus.size()) != dim || static_cast<int>(b_minus.size()) != dim)
        throw Error(ErrorCode::BadWeights, "need one b_plus and one b_minus per axis");
    if (trunc_radius < 1) throw Error(ErrorCode::BadSize, "trunc_radius must be >= 1");
    bool any = false;
    for (int i = 0; i < dim; ++i) {
        if (!(b_plus[i] >= 0.0) || !(b_minus[i] >= 0.0))
            throw Error(ErrorCode::BadWeights, "direction weights must be nonnegative");
        if (b_plus[i] + b_minus[i] > 0.0) any = true;
    }
    if (!any) throw Error(ErrorCode::BadWeights, "all direction weights vanish");
    for (int i = 0; i < dim; ++i)
        if (!(b_plus[i] + b_minus[i] > 0.0))
            throw Error(ErrorCode::NonIrreducible, "axis " + std::to_string(i) + " carries no symmetric weight");

    std::vector<double> b_bar(dim), delta(dim);
    double asym = 0.0, min_both = 1e300;
    for (int i = 0; i < dim; ++i) {
        b_bar[i] = 0.5 * (b_plus[i] + b_minus[i]);
        delta[i] = 0.5 * (b_plus[i] - b_minus[i]);
        asym += std::abs(delta[i]);
        min_both = std::min(min_both, std::min(b_plus[i], b_minus[i]));
    }
    switch (variant) {
        case Variant::SYM:
            if (asym != 0.0) throw Error(ErrorCode::BadVariant, "SYM requires b_plus == b_minus");
            break;
        case Variant::LA:
            if (!(min_both > 0.0) || asym == 0.0)
                throw Error(ErrorCode::BadVariant, "LA requires min(b+, b-) > 0 and b+ != b- on some axis");
            break;
        case Variant::SA:
        case Variant::NNA:
            if (asym == 0.0) throw Error(ErrorCode::BadVariant, "SA/NNA need an antisymmetric part");
            if (variant == Variant::SA && options.asym_radius < 1)
                throw Error(ErrorCode::BadVariant, "asym_radius must be >= 1");
            break;
        case Variant::MZA: {
            if (asym == 0.0) throw Error(ErrorCode::BadVariant, "MZA needs an antisymmetric part");
            if (trunc_radius < 2) throw Error(ErrorCode::BadVariant, "MZA needs trunc_radius >= 2");
            const double cap = 2.0 / std::pow(2.0, dim + alpha);
            for (int i = 0; i < dim; ++i)
                if (!(std::abs(delta[i]) < cap * b_bar[i]))
                    throw Error(ErrorCode::BadVariant, "MZA drift correction would make p negative");
            break;
        }
        case Variant::FR:
            if (options.fr_radius < 0 || options.fr_radius > trunc_radius)
                throw Error(ErrorCode::BadVariant, "fr_radius must lie in [1, trunc_radius]");
            break;
    }
    if (variant == Variant::NNA) options.asym_radius = 1;
    if (variant == Variant::FR && options.fr_radius == 0) options.fr_radius = trunc_radius;

    JumpKernel k;
    k.dim_ = dim;
    k.alpha_ = alpha;
    k.b_plus_ = b_plus;
    k.b_minus_ = b_minus;
    k.variant_ = variant;
    k.trunc_radius_ = trunc_radius;
    k.options_ = options;

    const int R = trunc_radius;
    std::vector<double> w;
    if (dim == 1) {
        k.disp_.reserve(2 * static_cast<std::size_t>(R));
        for (int y = -R; y <= R; ++y)
            if (y != 0) k.disp_.push_back({y, 0});
    } else {
        k.disp_.reserve((2 * static_cast<std::size_t>(R) + 1) * (2 * R + 1) - 1);
        for (int y2 = -R; y2 <= R; ++y2)
            for (int y1 = -R; y1 <= R; ++y1)
                if (y1 != 0 || y2 != 0) k.disp_.push_back({y1, y2});
    }
    w.resize(k.disp_.size());
    const double expo = dim + alpha;
    for (std::size_t j = 0; j < k.disp_.size(); ++j) {
        const Disp& y = k.disp_[j];
        double g;
        switch (variant) {
            case Variant::SA:
            case Variant::NNA: {
                bool near = variant == Variant::NNA ? (std::abs(y[0]) + std::abs(y[1]) == 1)
                                                    : norm_inf(y) <= options.asym_radius;
                g = near ? gamma_weight(y, dim, b_plus, b_minus) : gamma_weight(y, dim, b_bar, b_bar);
                break;
            }
            case Variant::MZA:
                g = gamma_weight(y, dim, b_bar, b_bar);
                break;
            case Variant::FR:
                g = norm_inf(y) <= options.fr_radius ? gamma_weight(y, dim, b_plus, b_minus) : 0.0;
                break;
            default:
                g = gamma_weight(y, dim, b_plus, b_minus);
        }
        w[j] = g / std::pow(norm(y, dim), expo);
    }
    if (variant == Variant::MZA) {
        for (int i = 0; i < dim; ++i) {
            Disp e{0, 0}, e2{0, 0};
            e[i] = 1;
            e2[i] = 2;
            w[k.index_of(e)] += delta[i];
            w[k.index_of({-e[0], -e[1]})] -= delta[i];
            w[k.index_of(e2)] -= 0.5 * delta[i];
            w[k.index_of({-e2[0], -e2[1]})] += 0.5 * delta[i];
        }
    }
    CompensatedSum total;
    for (double x : w) total.add(x);
    k.c_norm_ = 1.0 / total.value();
    k.prob_.resize(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) k.prob_[j] = w[j] * k.c_norm_;

    for (std::size_t j = 0; j < k.disp_.size(); ++j) {
        const Disp& y = k.disp_[j];
        if (k.prob_[j] < 0.0) throw Error(ErrorCode::BadVariant, "negative jump probability");
        if (variant != Variant::FR && !(k.s(y) > 0.0))
            throw Error(ErrorCode::NonIrreducible, "symmetric part vanishes inside the support");
    }
    k.alias_ = AliasTable(k.prob_);
    return k;
}

std::size_t JumpKernel::index_of(const Disp& y) const {
    const int R = trunc_radius_;
    if (dim_ == 1) return static_cast<std::size_t>(y[0] < 0 ? y[0] + R : y[0] + R - 1);
    std::size_t flat = static_cast<std::size_t>(y[1] + R) * (2 * R + 1) + static_cast<std::size_t>(y[0] + R);
    std::size_t centre = static_cast<std::size_t>(R) * (2 * R + 1) + R;
    return flat > centre ? flat - 1 : flat;
}

double JumpKernel::p(const Disp& y) const {
    const int R = trunc_radius_;
    if (y[0] == 0 && y[1] == 0) return 0.0;
    if (std::abs(y[0]) > R || std::abs(y[1]) > R) return 0.0;
    if (dim_ == 1 && y[1] != 0) return 0.0;
    return prob_[index_of(y)];
}

std::array<double, 2> JumpKernel::mean() const {
    CompensatedSum m0, m1;
    for (std::size_t j = 0; j < disp_.size(); ++j) {
        m0.add(disp_[j][0] * prob_[j]);
        m1.add(disp_[j][1] * prob_[j]);
    }
    return {m0.value(), m1.value()};
}

JumpKernel JumpKernel::symmetrized() const {
    std::vector<double> bb(dim_);
    for (int i = 0; i < dim_; ++i) bb[i] = b_bar(i);
    if (variant_ == Variant::FR) {
        // Keep the finite range; only the direction weights are averaged.
        return build_kernel(dim_, alpha_, bb, bb, Variant::FR, trunc_radius_, options_);
    }
    return build_kernel(dim_, alpha_, bb, bb, Variant::SYM, trunc_radius_, options_);
}

}  // namespace lrex
