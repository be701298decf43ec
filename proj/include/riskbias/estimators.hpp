#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "riskbias/errors.hpp"
#include "riskbias/nelder_mead.hpp"

namespace riskbias {

struct GaussianFit {
    double mu = 0.0;
    double sigma = 1.0;
    std::size_t n = 0;
};

struct GpdFit {
    double u = 0.0; // threshold the excesses were taken against
    double xi = 0.0;
    double beta = 1.0;
    std::size_t n = 0;
};

struct GarchFit {
    double mu = 0.0;
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double sigma_next = 0.0; // one-step-ahead volatility forecast
    std::size_t n = 0;
};

inline double sample_mean(std::span<const double> x) {
    if (x.empty()) throw DegenerateSampleError("sample_mean: empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double sample_sd(std::span<const double> x) {
    if (x.size() < 2) throw DegenerateSampleError("sample_sd: need at least two points");
    const double m = sample_mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline GaussianFit fit_gaussian(std::span<const double> x) {
    GaussianFit fit;
    fit.n = x.size();
    fit.mu = sample_mean(x);
    fit.sigma = sample_sd(x);
    if (!(fit.sigma > 0.0))
        throw DegenerateSampleError("fit_gaussian: sample has zero variance");
    return fit;
}

// Probability-weighted-moment fit of a GPD to sorted ascending excesses
// z_i = u - x_i of a lower-tail sample:
//   a0 = mean(z),  a1 = (1/n) sum z_(i) (n-i)/(n-1),
//   xi = 2 - a0/(a0 - 2 a1),  beta = 2 a0 a1/(a0 - 2 a1).
inline GpdFit fit_gpd_pwm_sorted_excesses(std::span<const double> z, double u) {
    const std::size_t n = z.size();
    if (n < 2) throw DegenerateSampleError("fit_gpd_pwm: need at least two points");
    double a0 = 0.0, a1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        a0 += z[i];
        a1 += z[i] * static_cast<double>(n - 1 - i);
    }
    a0 /= static_cast<double>(n);
    a1 /= static_cast<double>(n) * static_cast<double>(n - 1);
    const double denom = a0 - 2.0 * a1;
    if (!(denom > 0.0))
        throw IllPosedFitError("fit_gpd_pwm: a0 - 2 a1 <= 0");
    GpdFit fit;
    fit.u = u;
    fit.n = n;
    fit.xi = 2.0 - a0 / denom;
    fit.beta = 2.0 * a0 * a1 / denom;
    if (!(fit.beta > 0.0))
        throw IllPosedFitError("fit_gpd_pwm: nonpositive scale");
    return fit;
}

inline GpdFit fit_gpd_pwm(std::span<const double> x, double u) {
    if (x.size() < 2) throw DegenerateSampleError("fit_gpd_pwm: need at least two points");
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        z[i] = u - x[i];
        if (z[i] < 0.0)
            throw DomainError("fit_gpd_pwm: observation above the threshold");
    }
    std::sort(z.begin(), z.end());
    return fit_gpd_pwm_sorted_excesses(z, u);
}

// Gaussian quasi-likelihood for a GARCH(1,1) window: the recursion runs on
// raw squared observations, seeded with sigma_start for the first term.
inline double garch_quasi_loglik_neg(std::span<const double> x, double mu, double omega,
                                     double alpha, double beta, double sigma_start) {
    double var = sigma_start * sigma_start;
    double nll = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (t > 0) var = omega + alpha * x[t - 1] * x[t - 1] + beta * var;
        const double resid = x[t] - mu;
        nll += std::log(var) + resid * resid / var;
    }
    return nll;
}

// QMLE of (omega, alpha, beta) by Nelder-Mead over a softmax
// reparameterization that enforces alpha + beta < 1 and omega > 0; the mean
// is the window average. sigma_start seeds the variance recursion (callers
// typically pass the window standard deviation).
inline GarchFit fit_garch_qmle(std::span<const double> x, double sigma_start,
                               int max_iter = 500) {
    if (x.size() < 10) throw DegenerateSampleError("fit_garch_qmle: window too short");
    if (!(sigma_start > 0.0)) throw DomainError("fit_garch_qmle: sigma_start must be positive");
    const double mu = sample_mean(x);
    const double v = sample_sd(x);
    if (!(v > 0.0)) throw DegenerateSampleError("fit_garch_qmle: zero variance window");

    const auto unpack = [](const std::vector<double>& p, double& omega, double& alpha,
                           double& beta) {
        const double e1 = std::exp(p[1]), e2 = std::exp(p[2]);
        const double denom = 1.0 + e1 + e2;
        omega = std::exp(p[0]);
        alpha = e1 / denom;
        beta = e2 / denom;
    };

    const auto objective = [&](const std::vector<double>& p) {
        double omega, alpha, beta;
        unpack(p, omega, alpha, beta);
        if (!std::isfinite(omega) || omega <= 0.0) return 1e100;
        return garch_quasi_loglik_neg(x, mu, omega, alpha, beta, sigma_start);
    };

    // start: omega = 0.1 * window variance, alpha = 0.1, beta = 0.8
    std::vector<double> start{std::log(0.1 * v * v), 0.0, std::log(8.0)};
    auto res = nelder_mead(objective, start, 0.25, 1e-10, max_iter);
    if (!res.converged)
        throw FitFailureError("fit_garch_qmle: optimizer hit the iteration cap");

    GarchFit fit;
    fit.n = x.size();
    fit.mu = mu;
    unpack(res.x, fit.omega, fit.alpha, fit.beta);

    // Replay the recursion to get the one-step-ahead forecast.
    double var = sigma_start * sigma_start;
    for (std::size_t t = 1; t < x.size(); ++t)
        var = fit.omega + fit.alpha * x[t - 1] * x[t - 1] + fit.beta * var;
    fit.sigma_next = std::sqrt(fit.omega + fit.alpha * x.back() * x.back() + fit.beta * var);
    return fit;
}

enum class QuantileMethod {
    order_statistic, // y_(floor(n q) + 1); the convention tied to exact duality
    interpolated     // plotting-position h = (n - 1) q + 1 with linear interpolation
};

inline double empirical_quantile_sorted(std::span<const double> sorted, double q,
                                        QuantileMethod method = QuantileMethod::order_statistic) {
    const std::size_t n = sorted.size();
    if (n == 0) throw DegenerateSampleError("empirical_quantile: empty sample");
    if (!(q > 0.0 && q < 1.0)) throw DomainError("empirical_quantile: q must lie in (0, 1)");
    if (method == QuantileMethod::order_statistic) {
        std::size_t k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * q)) + 1;
        if (k > n) k = n;
        return sorted[k - 1];
    }
    const double h = (static_cast<double>(n) - 1.0) * q + 1.0;
    const double fl = std::floor(h);
    std::size_t lo = static_cast<std::size_t>(fl);
    if (lo < 1) lo = 1;
    if (lo >= n) return sorted[n - 1];
    const double w = h - fl;
    return sorted[lo - 1] + w * (sorted[lo] - sorted[lo - 1]);
}

inline double empirical_quantile(std::span<const double> x, double q,
                                 QuantileMethod method = QuantileMethod::order_statistic) {
    if (x.empty()) throw DegenerateSampleError("empirical_quantile: empty sample");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    return empirical_quantile_sorted(sorted, q, method);
}

} // namespace riskbias
