#include "lrex/simd/kernels.hpp"
#include "scalar_math.hpp"

#include <immintrin.h>

#include <cmath>
#include <numbers>

namespace lrex::simd {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// e^x for x <= 0; returns 0 below -700.
inline __m256d exp_nonpos(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
    const __m256d ln2hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2lo = _mm256_set1_pd(1.90821492927058770002e-10);
    __m256d underflow = _mm256_cmp_pd(x, _mm256_set1_pd(-700.0), _CMP_LT_OQ);
    x = _mm256_max_pd(x, _mm256_set1_pd(-700.0));
    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2hi, x);
    r = _mm256_fnmadd_pd(n, ln2lo, r);
    // Taylor to r^13; |r| <= ln2/2.
    __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
    static const double c[] = {1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
                               1.0 / 362880.0,    1.0 / 40320.0,    1.0 / 5040.0,
                               1.0 / 720.0,       1.0 / 120.0,      1.0 / 24.0,
                               1.0 / 6.0,         0.5,              1.0,
                               1.0};
    for (double ci : c) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(ci));
    __m128i ni = _mm256_cvtpd_epi32(n);
    __m256i e = _mm256_cvtepi32_epi64(ni);
    e = _mm256_slli_epi64(_mm256_add_epi64(e, _mm256_set1_epi64x(1023)), 52);
    __m256d res = _mm256_mul_pd(p, _mm256_castsi256_pd(e));
    return _mm256_andnot_pd(underflow, res);
}

// sin(pi f) for f in [-1/2, 1/2]; odd Taylor polynomial to degree 25.
inline __m256d sin_pi(__m256d f) {
    __m256d x = _mm256_mul_pd(f, _mm256_set1_pd(std::numbers::pi));
    __m256d x2 = _mm256_mul_pd(x, x);
    __m256d p = _mm256_set1_pd(1.0 / 1.5511210043330986e25);  // 1/25!
    static const double c[] = {-1.0 / 2.585201673888498e22,  // 1/23!
                               1.0 / 5.109094217170944e19,   // 1/21!
                               -1.0 / 1.21645100408832e17,   // 1/19!
                               1.0 / 355687428096000.0,      // 1/17!
                               -1.0 / 1307674368000.0,       // 1/15!
                               1.0 / 6227020800.0,
                               -1.0 / 39916800.0,
                               1.0 / 362880.0,
                               -1.0 / 5040.0,
                               1.0 / 120.0,
                               -1.0 / 6.0,
                               1.0};
    for (double ci : c) p = _mm256_fmadd_pd(p, x2, _mm256_set1_pd(ci));
    return _mm256_mul_pd(p, x);
}

// cos(pi f) for f in [-1/2, 1/2]; even Taylor polynomial to degree 26.
inline __m256d cos_pi(__m256d f) {
    __m256d x = _mm256_mul_pd(f, _mm256_set1_pd(std::numbers::pi));
    __m256d x2 = _mm256_mul_pd(x, x);
    __m256d p = _mm256_set1_pd(-1.0 / 4.0329146112660565e26);  // -1/26!
    static const double c[] = {1.0 / 6.204484017332394e23,   // 1/24!
                               -1.0 / 1.1240007277776077e21,  // 1/22!
                               1.0 / 2.43290200817664e18,     // 1/20!
                               -1.0 / 6402373705728000.0,     // 1/18!
                               1.0 / 20922789888000.0,        // 1/16!
                               -1.0 / 87178291200.0,
                               1.0 / 479001600.0,
                               -1.0 / 3628800.0,
                               1.0 / 40320.0,
                               -1.0 / 720.0,
                               1.0 / 24.0,
                               -0.5,
                               1.0};
    for (double ci : c) p = _mm256_fmadd_pd(p, x2, _mm256_set1_pd(ci));
    return p;
}

inline __m256d frac_centered(__m256d y) {
    return _mm256_sub_pd(y, _mm256_round_pd(y, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC));
}

inline __m256d g_vec(__m256d x) {
    const __m256d one = _mm256_set1_pd(1.0);
    // Series branch: sum_k (-x)^k/(k+2)!, Horner from the top.
    __m256d nx = _mm256_sub_pd(_mm256_setzero_pd(), x);
    __m256d s = _mm256_set1_pd(0.0);
    for (int k = 15; k >= 0; --k) {
        double inv = 1.0;
        for (int j = 2; j <= k + 2; ++j) inv /= j;
        s = _mm256_fmadd_pd(s, nx, _mm256_set1_pd(inv));
    }
    __m256d safe = _mm256_max_pd(x, _mm256_set1_pd(scalar::kSeriesCut));
    __m256d direct = _mm256_div_pd(_mm256_add_pd(_mm256_sub_pd(safe, one), exp_nonpos(_mm256_sub_pd(_mm256_setzero_pd(), safe))),
                                   _mm256_mul_pd(safe, safe));
    __m256d use_series = _mm256_cmp_pd(x, _mm256_set1_pd(scalar::kSeriesCut), _CMP_LT_OQ);
    return _mm256_blendv_pd(direct, s, use_series);
}

inline __m256d h_vec(__m256d x) {
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d nx = _mm256_sub_pd(_mm256_setzero_pd(), x);
    __m256d s = _mm256_set1_pd(0.0);
    for (int k = 15; k >= 0; --k) {
        double inv = 1.0;
        for (int j = 2; j <= k + 1; ++j) inv /= j;
        s = _mm256_fmadd_pd(s, nx, _mm256_set1_pd(inv));
    }
    __m256d safe = _mm256_max_pd(x, _mm256_set1_pd(scalar::kSeriesCut));
    __m256d direct = _mm256_div_pd(_mm256_sub_pd(one, exp_nonpos(_mm256_sub_pd(_mm256_setzero_pd(), safe))), safe);
    __m256d use_series = _mm256_cmp_pd(x, _mm256_set1_pd(scalar::kSeriesCut), _CMP_LT_OQ);
    return _mm256_blendv_pd(direct, s, use_series);
}

inline __m256d iota4() { return _mm256_set_pd(3.0, 2.0, 1.0, 0.0); }

double sin2_series(const double* coef, std::size_t n, double step, double phase) {
    __m256d acc = _mm256_setzero_pd();
    __m256d vstep = _mm256_set1_pd(step), vphase = _mm256_set1_pd(phase);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256d idx = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(k)), iota4());
        __m256d s = sin_pi(frac_centered(_mm256_fmadd_pd(vstep, idx, vphase)));
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(coef + k), _mm256_mul_pd(s, s), acc);
    }
    double tail = detail::scalar_table().sin2_series(coef + k, n - k, step, std::fma(step, static_cast<double>(k), phase));
    return hsum(acc) + tail;
}

double sin_series(const double* coef, std::size_t n, double step, double phase) {
    __m256d acc = _mm256_setzero_pd();
    __m256d vstep = _mm256_set1_pd(step), vphase = _mm256_set1_pd(phase);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256d idx = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(k)), iota4());
        __m256d f = frac_centered(_mm256_fmadd_pd(vstep, idx, vphase));
        __m256d s2 = _mm256_mul_pd(_mm256_set1_pd(2.0), _mm256_mul_pd(sin_pi(f), cos_pi(f)));
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(coef + k), s2, acc);
    }
    double tail = detail::scalar_table().sin_series(coef + k, n - k, step, std::fma(step, static_cast<double>(k), phase));
    return hsum(acc) + tail;
}

double variance_reduce(const double* theta, const double* w, std::size_t n, double t) {
    __m256d acc = _mm256_setzero_pd(), vt = _mm256_set1_pd(t);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), g_vec(_mm256_mul_pd(_mm256_loadu_pd(theta + i), vt)), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * scalar::g_fn(theta[i] * t);
    return s * t * t;
}

double resolvent_reduce(const double* theta, const double* w, std::size_t n, double lambda) {
    __m256d acc = _mm256_setzero_pd(), vl = _mm256_set1_pd(lambda);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_loadu_pd(w + i), _mm256_add_pd(vl, _mm256_loadu_pd(theta + i))));
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] / (lambda + theta[i]);
    return s;
}

double ratio_reduce(const double* num, const double* den, const double* w, std::size_t n, double lambda) {
    __m256d acc = _mm256_setzero_pd(), vl = _mm256_set1_pd(lambda);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d q = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(num + i));
        acc = _mm256_add_pd(acc, _mm256_div_pd(q, _mm256_add_pd(vl, _mm256_loadu_pd(den + i))));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * num[i] / (lambda + den[i]);
    return s;
}

double green_reduce(const double* theta, const double* w, std::size_t n, double t) {
    __m256d acc = _mm256_setzero_pd(), vt = _mm256_set1_pd(t);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), h_vec(_mm256_mul_pd(_mm256_loadu_pd(theta + i), vt)), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * scalar::h_fn(theta[i] * t);
    return s * t;
}

double green_sq_reduce(const double* theta, const double* w, std::size_t n, double t) {
    __m256d acc = _mm256_setzero_pd(), vt = _mm256_set1_pd(t);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d h = h_vec(_mm256_mul_pd(_mm256_loadu_pd(theta + i), vt));
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(h, h), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double h = scalar::h_fn(theta[i] * t);
        s += w[i] * h * h;
    }
    return s * t * t;
}

const KernelTable kTable{Isa::Avx2,       sin2_series,  sin_series,   variance_reduce,
                         resolvent_reduce, ratio_reduce, green_reduce, green_sq_reduce};

}  // namespace

namespace detail {
const KernelTable* avx2_table() { return &kTable; }
}  // namespace detail

}  // namespace lrex::simd
