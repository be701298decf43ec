#pragma once

#include <cmath>
#include <limits>

#include "riskbias/errors.hpp"

namespace riskbias {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Inverse standard normal cdf, Wichura's PPND16 rational approximations.
// Absolute error below 1e-15 over (0, 1).
inline double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("norm_quantile: p must lie in (0, 1)");
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz), valid for
// x < (a+1)/(a+b+2).
inline double beta_cont_frac(double a, double b, double x) {
    constexpr int kMaxIter = 2000;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw Error("incomplete beta continued fraction did not converge");
}

} // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw DomainError("incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                  a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::beta_cont_frac(a, b, x) / a;
    return 1.0 - front * detail::beta_cont_frac(b, a, 1.0 - x) / b;
}

inline double student_t_pdf(double t, double nu) {
    if (!(nu > 0.0)) throw DomainError("student_t_pdf: nu must be positive");
    return std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                    0.5 * std::log(nu * kPi) -
                    0.5 * (nu + 1.0) * std::log1p(t * t / nu));
}

inline double student_t_cdf(double t, double nu) {
    if (!(nu > 0.0)) throw DomainError("student_t_cdf: nu must be positive");
    if (t == 0.0) return 0.5;
    const double x = nu / (nu + t * t);
    const double half_tail = 0.5 * incomplete_beta(0.5 * nu, 0.5, x);
    return t < 0.0 ? half_tail : 1.0 - half_tail;
}

// Inverse Student-t cdf. Exact Newton refinement of a normal start for
// moderate nu; for very large nu the cdf's incomplete-beta arguments sit on
// the continued fraction's convergence boundary, so a 1/nu expansion around
// the normal quantile is used instead (error O(nu^-3)).
inline double student_t_quantile(double p, double nu) {
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("student_t_quantile: p must lie in (0, 1)");
    if (!(nu > 0.0)) throw DomainError("student_t_quantile: nu must be positive");
    if (p == 0.5) return 0.0;

    const double z = norm_quantile(p);
    if (nu > 2e5) {
        const double z3 = z * z * z, z5 = z3 * z * z;
        return z + (z3 + z) / (4.0 * nu) +
               (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * nu * nu);
    }

    double t = z * std::sqrt(nu / std::max(nu - 2.0, 0.5));
    if (nu <= 2.0) t = z / std::sqrt(std::max(1.0 - 2.0 / (nu + 1.5), 0.05));

    // Bracket the root, then safeguarded Newton.
    double lo = t, hi = t;
    double step = std::max(1.0, std::fabs(t));
    while (student_t_cdf(lo, nu) > p) { lo -= step; step *= 2.0; }
    step = std::max(1.0, std::fabs(t));
    while (student_t_cdf(hi, nu) < p) { hi += step; step *= 2.0; }
    t = 0.5 * (lo + hi);
    for (int iter = 0; iter < 100; ++iter) {
        const double f = student_t_cdf(t, nu) - p;
        if (f > 0.0) hi = t; else lo = t;
        const double dens = student_t_pdf(t, nu);
        double next = t - f / dens;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double moved = std::fabs(next - t);
        t = next;
        if (moved <= 1e-14 * (1.0 + std::fabs(t)) && std::fabs(f) < 1e-12) break;
    }
    return t;
}

// P(Bin(n, p) <= k) by direct summation of the mass function in log space.
inline double binomial_cdf(long n, double p, long k) {
    if (n < 0) throw DomainError("binomial_cdf: n must be nonnegative");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial_cdf: p must lie in [0, 1]");
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    if (p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;
    const double lp = std::log(p), lq = std::log1p(-p);
    const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
    double sum = 0.0;
    for (long j = 0; j <= k; ++j) {
        const double lterm = lgn - std::lgamma(static_cast<double>(j) + 1.0) -
                             std::lgamma(static_cast<double>(n - j) + 1.0) +
                             static_cast<double>(j) * lp +
                             static_cast<double>(n - j) * lq;
        sum += std::exp(lterm);
    }
    return std::min(sum, 1.0);
}

} // namespace riskbias
