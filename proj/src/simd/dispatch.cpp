#include "lrex/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string_view>

namespace lrex::simd {

namespace detail {
#ifndef LREX_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif
}  // namespace detail

bool available(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if defined(LREX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2") &&
                   __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

const char* name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable& kernels(Isa isa) {
    if (!available(isa)) throw std::runtime_error(std::string("ISA unavailable: ") + name(isa));
    return isa == Isa::Avx2 ? *detail::avx2_table() : detail::scalar_table();
}

const KernelTable& kernels() {
    static const KernelTable& chosen = [] () -> const KernelTable& {
        const char* env = std::getenv("LREX_SIMD");
        if (env && std::string_view(env) == "scalar") return detail::scalar_table();
        return available(Isa::Avx2) ? *detail::avx2_table() : detail::scalar_table();
    }();
    return chosen;
}

}  // namespace lrex::simd
