#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "riskbias/distributions.hpp"
#include "riskbias/errors.hpp"
#include "riskbias/estimators.hpp"
#include "riskbias/math.hpp"
#include "riskbias/parallel.hpp"
#include "riskbias/rng.hpp"

namespace riskbias {

enum class RiskKind { var, es, evar };

// level is the exceedance level alpha. With conditional = true (GPD tail
// models) the level refers to the law conditioned on being in the tail
// region X <= u.
struct RiskSpec {
    RiskKind kind = RiskKind::var;
    double level = 0.05;
    bool conditional = false;
};

namespace detail {

inline void check_level(const RiskSpec& risk) {
    if (!(risk.level > 0.0 && risk.level < 1.0))
        throw DomainError("risk level must lie in (0, 1)");
}

} // namespace detail

// ---------------------------------------------------------------------------
// expectiles

// Population expectile: the unique root e of
//   alpha E[(X - e)+] - (1 - alpha) E[(e - X)+] = 0.
inline double expectile_solve(const DistributionSpec& spec, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("expectile_solve: alpha must lie in (0, 1)");
    const auto psi = [&](double e) {
        return alpha * partial_moment(spec, e, MomentSide::above) -
               (1.0 - alpha) * partial_moment(spec, e, MomentSide::below);
    };
    // psi is continuous and strictly decreasing; bracket by doubling.
    double lo = dist_mean(spec) - 1.0, hi = dist_mean(spec) + 1.0;
    double step = 1.0;
    while (psi(lo) < 0.0) { lo -= step; step *= 2.0; if (step > 1e12) throw BracketFailureError("expectile_solve: no lower bracket"); }
    step = 1.0;
    while (psi(hi) > 0.0) { hi += step; step *= 2.0; if (step > 1e12) throw BracketFailureError("expectile_solve: no upper bracket"); }
    double e = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = psi(e);
        if (f > 0.0) lo = e; else hi = e;
        const double fp = -(alpha + (1.0 - 2.0 * alpha) * dist_cdf(spec, e));
        double next = e - f / fp;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double moved = std::fabs(next - e);
        e = next;
        if (moved <= 1e-12 * (1.0 + std::fabs(e)) && std::fabs(f) <= 1e-10) break;
    }
    return e;
}

// Sample expectile by iteratively reweighted averaging: e is a fixed point of
// e = sum(w_i x_i)/sum(w_i), w_i = alpha for x_i > e and 1 - alpha otherwise.
// Damped on oscillation; relative tolerance 1e-9, 200-iteration cap.
inline double laws_expectile(std::span<const double> x, double alpha) {
    if (x.empty()) throw DegenerateSampleError("laws_expectile: empty sample");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("laws_expectile: alpha must lie in (0, 1)");
    double e = sample_mean(x);
    double damp = 1.0, prev_step = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        double wsum = 0.0, wx = 0.0;
        for (double v : x) {
            const double w = v > e ? alpha : 1.0 - alpha;
            wsum += w;
            wx += w * v;
        }
        const double target = wx / wsum;
        const double step = damp * (target - e);
        if (step * prev_step < 0.0) damp *= 0.5;
        prev_step = step;
        e += step;
        if (std::fabs(step) <= 1e-9 * (1.0 + std::fabs(e))) return e;
    }
    throw FitFailureError("laws_expectile: no convergence in 200 iterations");
}

// ---------------------------------------------------------------------------
// true risk

// Capital requirement of the generating law itself. VaR is the negated
// quantile; ES uses closed forms (Normal, GPD) or the partial-moment identity
// ES = -q + E[(q - X)+]/alpha; EVaR is the negated expectile.
inline double risk_true(const DistributionSpec& spec, const RiskSpec& risk) {
    detail::check_level(risk);
    if (std::holds_alternative<Garch11>(spec))
        throw UnsupportedError("risk_true: GARCH needs the conditional path, see garch_true_var");

    const auto* gpd = std::get_if<GpdLeftTail>(&spec);
    if (risk.conditional && !gpd)
        throw ConfigError("risk_true: conditional levels apply to GPD tail models only");

    double tail_level = risk.level; // level within the GPD excess law
    if (gpd) {
        if (!risk.conditional) {
            if (risk.level > gpd->p)
                throw DomainError("risk_true: level exceeds the modeled tail mass");
            tail_level = risk.level / gpd->p;
        }
    }

    switch (risk.kind) {
        case RiskKind::var: {
            if (gpd) return -gpd_conditional_quantile(*gpd, tail_level);
            return -dist_quantile(spec, risk.level);
        }
        case RiskKind::es: {
            if (gpd) {
                if (!(gpd->xi < 1.0))
                    throw InfiniteRiskError("risk_true: GPD expected shortfall needs xi < 1");
                const double var = -gpd_conditional_quantile(*gpd, tail_level);
                return var / (1.0 - gpd->xi) +
                       (gpd->beta + gpd->xi * gpd->u) / (1.0 - gpd->xi);
            }
            if (const auto* n = std::get_if<Normal>(&spec)) {
                const double q = norm_quantile(risk.level);
                return -n->mu + n->sigma * norm_pdf(q) / risk.level;
            }
            const double q = dist_quantile(spec, risk.level);
            return -q + partial_moment(spec, q, MomentSide::below) / risk.level;
        }
        case RiskKind::evar: {
            if (gpd && risk.conditional) {
                // expectile of the conditional tail law: restrict to p = 1
                GpdLeftTail cond = *gpd;
                cond.p = 1.0;
                return -expectile_solve(DistributionSpec{cond}, tail_level);
            }
            return -expectile_solve(spec, risk.level);
        }
    }
    throw ConfigError("risk_true: unknown risk kind");
}

inline double garch_true_var(const Garch11& g, double sigma_t, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("garch_true_var: alpha in (0,1)");
    if (!(sigma_t > 0.0)) throw DomainError("garch_true_var: sigma_t must be positive");
    return -(g.mu + sigma_t * norm_quantile(alpha));
}

// ---------------------------------------------------------------------------
// plug-in estimators

inline double risk_plugin(const GaussianFit& fit, const RiskSpec& risk) {
    detail::check_level(risk);
    if (risk.conditional) throw ConfigError("risk_plugin: Gaussian fits are unconditional");
    switch (risk.kind) {
        case RiskKind::var:
            return -(fit.mu + fit.sigma * norm_quantile(risk.level));
        case RiskKind::es: {
            const double q = norm_quantile(risk.level);
            return -fit.mu + fit.sigma * norm_pdf(q) / risk.level;
        }
        case RiskKind::evar: {
            const double e0 = expectile_solve(Normal{0.0, 1.0}, risk.level);
            return -(fit.mu + fit.sigma * e0);
        }
    }
    throw ConfigError("risk_plugin: unknown risk kind");
}

inline double risk_plugin(const GpdFit& fit, const RiskSpec& risk) {
    detail::check_level(risk);
    if (!risk.conditional)
        throw ConfigError("risk_plugin: GPD tail fits price conditional levels");
    const double l = -std::log(risk.level);
    double z;
    if (std::fabs(fit.xi) < 1e-12) z = fit.beta * l;
    else z = fit.beta * std::expm1(fit.xi * l) / fit.xi;
    const double var = -(fit.u - z);
    switch (risk.kind) {
        case RiskKind::var:
            return var;
        case RiskKind::es: {
            if (!(fit.xi < 1.0))
                throw InfiniteRiskError("risk_plugin: GPD expected shortfall needs xi < 1");
            return var / (1.0 - fit.xi) + (fit.beta + fit.xi * fit.u) / (1.0 - fit.xi);
        }
        case RiskKind::evar:
            throw UnsupportedError("risk_plugin: expectile capital not provided for GPD fits");
    }
    throw ConfigError("risk_plugin: unknown risk kind");
}

inline double risk_plugin(const GarchFit& fit, const RiskSpec& risk) {
    detail::check_level(risk);
    if (risk.kind != RiskKind::var)
        throw UnsupportedError("risk_plugin: GARCH forecasts price value-at-risk only");
    return -(fit.mu + fit.sigma_next * norm_quantile(risk.level));
}

// Expectile capital for Student-t data when the shape is known and location/
// scale come from sample moments: scale = sd * sqrt((nu-2)/nu).
inline double evar_plugin_student_moments(const GaussianFit& moments, double nu, double alpha) {
    if (!(nu > 2.0)) throw DomainError("evar_plugin_student_moments: needs nu > 2");
    const double scale = moments.sigma * std::sqrt((nu - 2.0) / nu);
    const double e0 = expectile_solve(StudentT{nu, 0.0, 1.0}, alpha);
    return -(moments.mu + scale * e0);
}

// ---------------------------------------------------------------------------
// unbiased Gaussian estimators

/// Replaces the normal quantile with the predictive Student-t quantile:
//   rho = -(mu + sigma * sqrt((n+1)/n) * t_{n-1}^{-1}(alpha)).
inline double var_unbiased_gaussian(const GaussianFit& fit, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("var_unbiased_gaussian: alpha in (0,1)");
    if (fit.n < 2) throw DomainError("var_unbiased_gaussian: needs n >= 2");
    const double n = static_cast<double>(fit.n);
    const double q = std::sqrt((n + 1.0) / n) * student_t_quantile(alpha, n - 1.0);
    return -(fit.mu + fit.sigma * q);
}

inline double es_unbiased_gaussian(const GaussianFit& fit, double alpha, double multiplier) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("es_unbiased_gaussian: alpha in (0,1)");
    const double q = norm_quantile(alpha);
    return -fit.mu + multiplier * fit.sigma * norm_pdf(q) / alpha;
}

// Pinned multiplier for n = 250 at the 2.5% expected-shortfall level.
inline constexpr double kEsMultiplier250 = 1.0077;

// Solves ES_alpha(X + rho_c) = 0 over the scale multiplier c for standard
// normal data, where rho_c = -(mu_hat) + c sigma_hat phi(z_alpha)/alpha.
// (mu_hat, sigma_hat) are drawn from their exact sampling law
// (N(0, 1/n) and sqrt(chi2_{n-1}/(n-1))), one fresh X per replicate, and the
// empirical shortfall of the secured values is driven to zero by bisection on
// a fixed replicate set.
inline double es_unbiased_multiplier(std::size_t n, double alpha, std::size_t replicates,
                                     std::uint64_t seed) {
    if (n < 2) throw DomainError("es_unbiased_multiplier: needs n >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("es_unbiased_multiplier: alpha in (0,1)");
    if (replicates < 1000) throw DomainError("es_unbiased_multiplier: too few replicates");

    const double nd = static_cast<double>(n);
    const double k = norm_pdf(norm_quantile(alpha)) / alpha;
    const double half_df = 0.5 * (nd - 1.0);

    struct Rep { double mu, sigma, x; };
    std::vector<Rep> reps(replicates);
    RandomStream root(seed);
    parallel_for(replicates, [&](std::size_t i) {
        RandomStream sub = root.substream(i);
        const double mu_hat = norm_quantile(sub.next_uniform()) / std::sqrt(nd);
        // chi-square via Marsaglia-Tsang gamma(shape, 2); shapes below one use
        // the gamma(shape + 1) boost with a U^(1/shape) factor
        const double shape = half_df >= 1.0 ? half_df : half_df + 1.0;
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        double gamma_draw;
        for (;;) {
            const double zn = norm_quantile(sub.next_uniform());
            const double v = (1.0 + c * zn) * (1.0 + c * zn) * (1.0 + c * zn);
            if (v <= 0.0) continue;
            const double u = sub.next_uniform();
            if (std::log(u) < 0.5 * zn * zn + d - d * v + d * std::log(v)) {
                gamma_draw = d * v;
                break;
            }
        }
        if (half_df < 1.0)
            gamma_draw *= std::pow(sub.next_uniform(), 1.0 / half_df);
        const double chi2 = 2.0 * gamma_draw;
        reps[i] = {mu_hat, std::sqrt(chi2 / (nd - 1.0)), norm_quantile(sub.next_uniform())};
    });

    std::vector<double> secured(replicates);
    const std::size_t tail = static_cast<std::size_t>(
                                 std::floor(static_cast<double>(replicates) * alpha)) + 1;
    const auto shortfall_at = [&](double c) {
        for (std::size_t i = 0; i < replicates; ++i)
            secured[i] = reps[i].x - reps[i].mu + c * k * reps[i].sigma;
        std::nth_element(secured.begin(), secured.begin() + static_cast<std::ptrdiff_t>(tail) - 1,
                         secured.end());
        double s = 0.0;
        for (std::size_t i = 0; i < tail; ++i) s += secured[i];
        return -s / static_cast<double>(tail);
    };

    double lo = 0.5, hi = 3.0;
    if (!(shortfall_at(lo) > 0.0) || !(shortfall_at(hi) < 0.0))
        throw BracketFailureError("es_unbiased_multiplier: root not bracketed in [0.5, 3]");
    for (int iter = 0; iter < 40 && hi - lo > 1e-4; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (shortfall_at(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// level adjustment for exact Pareto tails

// Exceedance level whose plug-in quantile removes the estimation bias for an
// exact Pareto law fitted by maximum likelihood on n observations:
//   p* = 1 - exp(-n ((1-p)^(-1/n) - 1)).
inline double pareto_adjusted_level(double p, std::size_t n) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("pareto_adjusted_level: p in (0,1)");
    if (n == 0) throw DomainError("pareto_adjusted_level: n must be positive");
    const double nd = static_cast<double>(n);
    return -std::expm1(-nd * std::expm1(-std::log1p(-p) / nd));
}

// ---------------------------------------------------------------------------
// empirical estimators

// Empirical capital of a window. VaR negates the empirical quantile; ES
// averages the window values at or below the negated VaR; EVaR negates the
// sample expectile.
inline double risk_empirical(std::span<const double> window, const RiskSpec& risk,
                             QuantileMethod method = QuantileMethod::order_statistic) {
    detail::check_level(risk);
    if (window.empty()) throw DegenerateSampleError("risk_empirical: empty window");
    switch (risk.kind) {
        case RiskKind::var:
            return -empirical_quantile(window, risk.level, method);
        case RiskKind::es: {
            const double var = -empirical_quantile(window, risk.level, method);
            double sum = 0.0;
            std::size_t count = 0;
            for (double x : window) {
                if (x + var <= 0.0) {
                    sum += x;
                    ++count;
                }
            }
            if (count == 0) throw EmptyTailError("risk_empirical: no tail observations");
            return -sum / static_cast<double>(count);
        }
        case RiskKind::evar:
            return -laws_expectile(window, risk.level);
    }
    throw ConfigError("risk_empirical: unknown risk kind");
}

} // namespace riskbias
