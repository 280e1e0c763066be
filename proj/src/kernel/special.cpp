#include "lrex/kernel/special.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace lrex::special {
namespace {

constexpr double kPi = std::numbers::pi;

// B_{2k} for k = 1..15.
constexpr double kBernoulli2k[] = {
    1.0 / 6.0,          -1.0 / 30.0,         1.0 / 42.0,          -1.0 / 30.0,
    5.0 / 66.0,         -691.0 / 2730.0,     7.0 / 6.0,           -3617.0 / 510.0,
    43867.0 / 798.0,    -174611.0 / 330.0,   854513.0 / 138.0,    -236364091.0 / 2730.0,
    8553103.0 / 6.0,    -23749461029.0 / 870.0, 8615841276005.0 / 14322.0};

// Euler-Maclaurin with N = 24 direct terms; used for x >= 0.
double zeta_em(double x) {
    constexpr int N = 24;
    double s = 0.0;
    for (int n = N - 1; n >= 1; --n) s += std::pow(n, -x);
    const double nn = N;
    s += std::pow(nn, 1.0 - x) / (x - 1.0) + 0.5 * std::pow(nn, -x);
    // Correction terms B_{2k}/(2k)! * x(x+1)...(x+2k-2) * N^{-x-2k+1}.
    double rising = x;           // x(x+1)...(x+2k-2)
    double fact = 2.0;           // (2k)!
    double npow = std::pow(nn, -x - 1.0);
    for (int k = 1; k <= 15; ++k) {
        double term = kBernoulli2k[k - 1] / fact * rising * npow;
        s += term;
        if (std::abs(term) < 1e-18 * std::abs(s)) break;
        rising *= (x + 2 * k - 1) * (x + 2 * k);
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
        npow /= nn * nn;
    }
    return s;
}

bool is_integer(double s) { return s == std::floor(s); }


// zeta(s - k) / k! for k = 1..kTerms-1, per thread for the last s seen.
constexpr int kTerms = 200;

const std::vector<double>& polylog_coefficients(double s) {
    thread_local double cached_s = NAN;
    thread_local std::vector<double> coef(kTerms, 0.0);
    if (s != cached_s) {
        const bool integral = is_integer(s);
        const int n = static_cast<int>(s);
        double fact = 1.0;
        for (int k = 1; k < kTerms; ++k) {
            fact *= k;
            coef[k] = (integral && k == n - 1) ? 0.0 : zeta(s - k) / fact;
        }
        cached_s = s;
    }
    return coef;
}

// Li_s(e^{i phi}) minus its k = 0 term zeta(s), |phi| <= pi.
std::complex<double> polylog_circle_minus_zeta(double s, double phi) {
    using cd = std::complex<double>;
    cd total(0.0, 0.0);
    const bool integral = is_integer(s);
    const int n = static_cast<int>(s);
    if (!integral) {
        // Gamma(1-s) (-i phi)^{s-1}
        double mag = std::tgamma(1.0 - s) * std::pow(phi, s - 1.0);
        double arg = -kPi * (s - 1.0) / 2.0;
        total += cd(mag * std::cos(arg), mag * std::sin(arg));
    }
    if (phi == 0.0) return total;
    const std::vector<double>& coef = polylog_coefficients(s);
    // (i phi)^k cycles through 1, i, -1, -i up to the factor phi^k.
    double re = 0.0, im = 0.0, pk = 1.0;
    int quiet = 0;  // consecutive negligible terms; zeta vanishes at negative even integers
    for (int k = 1; k < kTerms; ++k) {
        pk *= phi;
        double mag;
        if (integral && k == n - 1) {
            // (i phi)^k / k! * (H_{n-1} - log(-i phi))
            double fact = std::tgamma(k + 1.0);
            cd rot = std::pow(cd(0.0, 1.0), k);
            cd term = rot * (pk / fact) * (cd(harmonic(n - 1), 0.0) - cd(std::log(phi), -kPi / 2.0));
            re += term.real();
            im += term.imag();
            mag = std::abs(term);
        } else {
            double v = coef[k] * pk;
            switch (k & 3) {
                case 0: re += v; break;
                case 1: im += v; break;
                case 2: re -= v; break;
                default: im -= v; break;
            }
            mag = std::abs(v);
        }
        quiet = mag < 1e-19 * (std::abs(total.real() + re) + std::abs(total.imag() + im) + 1e-300) ? quiet + 1 : 0;
        if (k > n + 2 && quiet >= 3) break;
    }
    return total + cd(re, im);
}

}  // namespace

double harmonic(int n) {
    double h = 0.0;
    for (int k = 1; k <= n; ++k) h += 1.0 / k;
    return h;
}

double zeta(double x) {
    if (x == 1.0) throw std::domain_error("zeta pole at 1");
    if (x < 0.0 && is_integer(x) && std::fmod(-x, 2.0) == 0.0) return 0.0;
    if (x >= 0.0) return zeta_em(x);
    // Functional equation in log form.
    double y = 1.0 - x;
    double logmag = x * std::log(2.0) + (x - 1.0) * std::log(kPi) + std::lgamma(y);
    return std::exp(logmag) * std::sin(kPi * x / 2.0) * zeta_em(y);
}

double zeta_tail(double s, long n) {
    if (!(s > 1.0)) throw std::domain_error("zeta_tail requires s > 1");
    if (n < 1) n = 1;
    double head = 0.0;
    constexpr long kMin = 24;
    long m = n;
    for (; m < kMin; ++m) head += std::pow(static_cast<double>(m), -s);
    const double nn = static_cast<double>(m);
    double s_em = std::pow(nn, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(nn, -s);
    double rising = s, fact = 2.0, npow = std::pow(nn, -s - 1.0);
    for (int k = 1; k <= 15; ++k) {
        double term = kBernoulli2k[k - 1] / fact * rising * npow;
        s_em += term;
        if (std::abs(term) < 1e-18 * std::abs(s_em)) break;
        rising *= (s + 2 * k - 1) * (s + 2 * k);
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
        npow /= nn * nn;
    }
    return head + s_em;
}

double cos_deficit_sum(double s, double phi) {
    if (s <= 1.0) throw std::domain_error("cos_deficit_sum requires s > 1");
    if (phi == 0.0) return 0.0;
    return -polylog_circle_minus_zeta(s, phi).real();
}

double sine_sum(double s, double phi) {
    if (s <= 1.0) throw std::domain_error("sine_sum requires s > 1");
    if (phi == 0.0) return 0.0;
    return polylog_circle_minus_zeta(s, phi).imag();
}

double expint_e1(double x) {
    if (x <= 0.0) throw std::domain_error("expint_e1 requires x > 0");
    if (x < 1.5) {  // upper_gamma defers to this branch below 1.5
        double s = 0.0, term = 1.0;
        for (int n = 1; n < 60; ++n) {
            term *= -x / n;
            s += term / n;
            if (std::abs(term) < 1e-18) break;
        }
        return -std::numbers::egamma - std::log(x) - s;
    }
    return upper_gamma(0.0, x);
}

double upper_gamma(double a, double x) {
    if (!(x > 0.0)) throw std::domain_error("upper_gamma requires x > 0");
    if (x >= 1.5) {
        // Modified Lentz continued fraction.
        const double tiny = 1e-300;
        double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
        for (int i = 1; i < 5000; ++i) {
            double an = -i * (i - a);
            b += 2.0;
            d = an * d + b;
            if (std::abs(d) < tiny) d = tiny;
            c = b + an / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            double del = d * c;
            h *= del;
            if (std::abs(del - 1.0) < 1e-16) break;
        }
        return std::exp(-x + a * std::log(x)) * h;
    }
    if (is_integer(a) && a <= 0.0) {
        if (a == 0.0) return expint_e1(x);
        // Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a
        return (upper_gamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
    }
    // Gamma(a) - x^a sum_n (-x)^n / (n! (a+n)), non-integer or positive a.
    double s = 0.0, term = 1.0;
    for (int n = 0; n < 200; ++n) {
        if (n > 0) term *= -x / n;
        double t = term / (a + n);
        s += t;
        if (std::abs(t) < 1e-18 * std::abs(s)) break;
    }
    return std::tgamma(a) - std::pow(x, a) * s;
}

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.x[i] = -z;
        r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

}  // namespace lrex::special
