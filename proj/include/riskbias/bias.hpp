#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "riskbias/distributions.hpp"
#include "riskbias/errors.hpp"
#include "riskbias/estimators.hpp"
#include "riskbias/parallel.hpp"
#include "riskbias/risk.hpp"
#include "riskbias/rng.hpp"

namespace riskbias {

// Which estimator family the capital rescaling acts on. The multiplier a
// scales the fitted scale parameter (sigma for Gaussian fits, beta for GPD
// fits); the translation part is untouched.
enum class AdjustableEstimator { plug_in, unbiased_gaussian };

struct BiasSearchConfig {
    std::size_t replicates = 50000; // bootstrap sample count B
    double bias_allowance = 0.0;    // residual bias target, in bootstrap-SE units
    double bracket_lo = 0.5;
    double bracket_hi = 3.0;
    double tol_a = 1e-3;
    int max_bisect = 25;
    double max_drop_fraction = 0.05;
};

struct BiasEstimate {
    double bias = 0.0;        // empirical risk of the secured replicate values
    double breach_rate = 0.0; // fraction of secured values below zero
    std::size_t used = 0;
    std::size_t dropped = 0;
};

struct LocalAdjustment {
    double a = 1.0;
    double residual_bias = 0.0;
    double target = 0.0;
    double bootstrap_se = 0.0;
    std::size_t used = 0;
    std::size_t dropped = 0;
};

namespace detail {

// One bootstrap replicate: a fitted capital that is linear in the scale
// multiplier, rho(a) = c0 + a*c1, paired with one fresh draw x.
struct BiasReplicate {
    double c0 = 0.0;
    double c1 = 0.0;
    double x = 0.0;
    bool kept = false;
};

inline double replicate_capital(const DistributionSpec& theta, const RiskSpec& risk,
                                AdjustableEstimator estimator,
                                std::span<const double> training, double& c0) {
    if (const auto* g = std::get_if<GpdLeftTail>(&theta)) {
        if (estimator != AdjustableEstimator::plug_in)
            throw UnsupportedError("bias search: GPD supports the plug-in estimator only");
        const GpdFit fit = fit_gpd_pwm(training, g->u);
        c0 = -g->u;
        return risk_plugin(fit, risk);
    }
    if (std::holds_alternative<Normal>(theta)) {
        const GaussianFit fit = fit_gaussian(training);
        c0 = -fit.mu;
        if (estimator == AdjustableEstimator::plug_in) return risk_plugin(fit, risk);
        if (risk.kind != RiskKind::var)
            throw UnsupportedError("bias search: unbiased rescaling implemented for value-at-risk");
        return var_unbiased_gaussian(fit, risk.level);
    }
    throw UnsupportedError("bias search: law must be Normal or GpdLeftTail");
}

inline std::vector<BiasReplicate> make_bias_replicates(const DistributionSpec& theta,
                                                       const RiskSpec& risk,
                                                       AdjustableEstimator estimator,
                                                       std::size_t n, std::size_t count,
                                                       const RandomStream& rng,
                                                       double max_drop_fraction = 0.05) {
    if (n < 2) throw DomainError("bias search: window length must be at least 2");
    if (count < 100) throw DomainError("bias search: too few replicates");
    const bool conditional = std::holds_alternative<GpdLeftTail>(theta);
    if (conditional && !risk.conditional)
        throw ConfigError("bias search: GPD tail laws use conditional risk levels");

    std::vector<BiasReplicate> reps(count);
    parallel_for(count, [&](std::size_t i) {
        RandomStream sub = rng.substream(i);
        const auto draws = sample_iid(theta, n + 1, sub,
                                      conditional ? GpdSampling::conditional
                                                  : GpdSampling::unconditional);
        BiasReplicate rep;
        rep.x = draws.back();
        try {
            const std::span<const double> training(draws.data(), n);
            const double cap = replicate_capital(theta, risk, estimator, training, rep.c0);
            rep.c1 = cap - rep.c0;
            rep.kept = true;
        } catch (const IllPosedFitError&) {
            rep.kept = false;
        } catch (const DegenerateSampleError&) {
            rep.kept = false;
        } catch (const InfiniteRiskError&) {
            // shortfall capital undefined for this fit (shape >= 1)
            rep.kept = false;
        }
        reps[i] = rep;
    });

    const std::size_t dropped = static_cast<std::size_t>(
        std::count_if(reps.begin(), reps.end(), [](const BiasReplicate& r) { return !r.kept; }));
    if (static_cast<double>(dropped) >
        max_drop_fraction * static_cast<double>(count) + 1e-9)
        throw UnreliableBiasError("bias search: too many replicate fits failed");
    return reps;
}

// Empirical risk functional of the secured values x_i + rho_i(a).
inline BiasEstimate bias_of(const std::vector<BiasReplicate>& reps, const RiskSpec& risk,
                            double a, std::vector<double>& scratch) {
    scratch.clear();
    std::size_t breaches = 0;
    for (const auto& r : reps) {
        if (!r.kept) continue;
        const double v = r.x + r.c0 + a * r.c1;
        scratch.push_back(v);
        if (v < 0.0) ++breaches;
    }
    BiasEstimate est;
    est.used = scratch.size();
    est.dropped = reps.size() - scratch.size();
    if (est.used == 0) throw UnreliableBiasError("bias search: no usable replicates");
    est.breach_rate = static_cast<double>(breaches) / static_cast<double>(est.used);

    const std::size_t k = static_cast<std::size_t>(
                              std::floor(static_cast<double>(est.used) * risk.level)) + 1;
    switch (risk.kind) {
        case RiskKind::var: {
            std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k) - 1,
                             scratch.end());
            est.bias = -scratch[k - 1];
            break;
        }
        case RiskKind::es: {
            std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k) - 1,
                             scratch.end());
            double s = 0.0;
            for (std::size_t i = 0; i < k; ++i) s += scratch[i];
            est.bias = -s / static_cast<double>(k);
            break;
        }
        case RiskKind::evar:
            est.bias = -laws_expectile(scratch, risk.level);
            break;
    }
    return est;
}

} // namespace detail

// Monte Carlo estimate of the residual risk of the secured position
// X + rho_a: B training samples of size n are drawn from theta, the estimator
// is fitted to each and rescaled by a, each capital is paired with one fresh
// draw, and the empirical risk functional is evaluated on the secured values.
inline BiasEstimate risk_bias_at(const DistributionSpec& theta, const RiskSpec& risk,
                                 AdjustableEstimator estimator, double a, std::size_t n,
                                 std::size_t replicates, const RandomStream& rng) {
    const auto reps = detail::make_bias_replicates(theta, risk, estimator, n, replicates, rng);
    std::vector<double> scratch;
    scratch.reserve(reps.size());
    return detail::bias_of(reps, risk, a, scratch);
}

// Finds the scale multiplier a with risk_bias_at(theta, a) = target, where
// target = bias_allowance * (bootstrap SE of the unadjusted capital). One
// fixed replicate set is reused across all probes of a, so the root search
// sees a smooth monotone function.
inline LocalAdjustment bootstrap_adjustment(const DistributionSpec& theta, const RiskSpec& risk,
                                            AdjustableEstimator estimator, std::size_t n,
                                            const BiasSearchConfig& config,
                                            const RandomStream& rng) {
    const auto reps = detail::make_bias_replicates(theta, risk, estimator, n, config.replicates,
                                                   rng, config.max_drop_fraction);

    double sum = 0.0, sum2 = 0.0;
    std::size_t used = 0;
    for (const auto& r : reps) {
        if (!r.kept) continue;
        const double cap = r.c0 + r.c1;
        sum += cap;
        sum2 += cap * cap;
        ++used;
    }
    if (used < 2) throw UnreliableBiasError("bootstrap_adjustment: no usable replicates");
    const double mean = sum / static_cast<double>(used);
    const double var = std::max(0.0, (sum2 - sum * mean) / static_cast<double>(used - 1));

    LocalAdjustment adj;
    adj.bootstrap_se = std::sqrt(var);
    adj.target = config.bias_allowance * adj.bootstrap_se;
    adj.used = used;
    adj.dropped = reps.size() - used;

    std::vector<double> scratch;
    scratch.reserve(used);
    const auto g = [&](double a) {
        return detail::bias_of(reps, risk, a, scratch).bias - adj.target;
    };

    double lo = config.bracket_lo, hi = config.bracket_hi;
    if (!(g(lo) > 0.0) || !(g(hi) < 0.0))
        throw BracketFailureError("bootstrap_adjustment: root not bracketed");
    for (int iter = 0; iter < config.max_bisect && hi - lo > config.tol_a; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    adj.a = 0.5 * (lo + hi);
    adj.residual_bias = g(adj.a) + adj.target;
    return adj;
}

// Applies the fitted multiplier to a capital estimate; the translation part
// stays fixed and only the scale contribution is rescaled.
inline double adjusted_estimate(const GaussianFit& fit, const RiskSpec& risk, double a) {
    const double c0 = -fit.mu;
    return c0 + a * (risk_plugin(fit, risk) - c0);
}

inline double adjusted_estimate(const GpdFit& fit, const RiskSpec& risk, double a) {
    const double c0 = -fit.u;
    return c0 + a * (risk_plugin(fit, risk) - c0);
}

// ---------------------------------------------------------------------------
// shape-indexed multiplier table for rolling GPD backtests

// For GPD tail fits the fitted multiplier is invariant to the threshold u and
// the scale beta (both cancel exactly in the secured values), so a depends on
// the shape alone and can be tabulated once per (risk, n, B, seed) on a xi
// grid. Replicate substreams are shared across grid nodes, which keeps the
// tabulated curve smooth in xi.
class AdjustmentTable {
  public:
    AdjustmentTable() = default;
    AdjustmentTable(double xi_lo, double xi_step, std::vector<double> values)
        : xi_lo_(xi_lo), xi_step_(xi_step), values_(std::move(values)) {}

    // Piecewise-linear lookup; xi is clamped to the tabulated range.
    double lookup(double xi) const {
        if (values_.empty()) throw ConfigError("AdjustmentTable: empty table");
        const double xi_hi = xi_lo_ + xi_step_ * static_cast<double>(values_.size() - 1);
        const double clamped = std::clamp(xi, xi_lo_, xi_hi);
        const double pos = (clamped - xi_lo_) / xi_step_;
        const std::size_t idx = std::min(static_cast<std::size_t>(std::floor(pos)),
                                         values_.size() - 2);
        const double w = pos - static_cast<double>(idx);
        return values_[idx] * (1.0 - w) + values_[idx + 1] * w;
    }

    double xi_lo() const { return xi_lo_; }
    double xi_step() const { return xi_step_; }
    const std::vector<double>& values() const { return values_; }

  private:
    double xi_lo_ = 0.0;
    double xi_step_ = 0.01;
    std::vector<double> values_;
};

inline AdjustmentTable build_adjustment_table(const RiskSpec& risk, std::size_t n,
                                              const BiasSearchConfig& config,
                                              const RandomStream& rng, double xi_lo = -0.5,
                                              double xi_hi = 1.5, double xi_step = 0.01) {
    if (!risk.conditional)
        throw ConfigError("build_adjustment_table: GPD tables use conditional risk levels");
    if (!(xi_step > 0.0) || !(xi_hi > xi_lo))
        throw DomainError("build_adjustment_table: bad grid");
    const std::size_t points =
        static_cast<std::size_t>(std::lround((xi_hi - xi_lo) / xi_step)) + 1;
    const std::size_t count = config.replicates;

    // Exponential transforms of the shared uniforms: excesses are
    // z = expm1(xi * l)/xi with l = -log(1 - U), so one presorted l-row per
    // replicate serves every xi node (z is increasing in l).
    std::vector<double> ls(count * n);
    std::vector<double> lx(count);
    parallel_for(count, [&](std::size_t i) {
        RandomStream sub = rng.substream(i);
        double* row = ls.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) row[j] = -std::log1p(-sub.next_uniform());
        std::sort(row, row + n);
        lx[i] = -std::log1p(-sub.next_uniform());
    });

    std::vector<double> values(points);
    parallel_for(points, [&](std::size_t pi) {
        const double xi = xi_lo + xi_step * static_cast<double>(pi);
        std::vector<detail::BiasReplicate> reps(count);
        std::vector<double> z(n);
        const auto excess = [&](double l) {
            if (std::fabs(xi) < 1e-12) return l;
            return std::expm1(xi * l) / xi;
        };
        for (std::size_t i = 0; i < count; ++i) {
            const double* row = ls.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) z[j] = excess(row[j]);
            detail::BiasReplicate rep;
            rep.x = -excess(lx[i]);
            try {
                const GpdFit fit = fit_gpd_pwm_sorted_excesses(z, 0.0);
                rep.c0 = 0.0;
                rep.c1 = risk_plugin(fit, risk);
                rep.kept = true;
            } catch (const IllPosedFitError&) {
                rep.kept = false;
            } catch (const InfiniteRiskError&) {
                rep.kept = false;
            }
            reps[i] = rep;
        }
        const std::size_t dropped = static_cast<std::size_t>(std::count_if(
            reps.begin(), reps.end(), [](const detail::BiasReplicate& r) { return !r.kept; }));
        if (static_cast<double>(dropped) > config.max_drop_fraction * static_cast<double>(count))
            throw UnreliableBiasError("build_adjustment_table: too many failed fits");

        std::vector<double> scratch;
        scratch.reserve(count);
        const auto g = [&](double a) { return detail::bias_of(reps, risk, a, scratch).bias; };
        double lo = config.bracket_lo, hi = config.bracket_hi;
        if (!(g(lo) > 0.0) || !(g(hi) < 0.0))
            throw BracketFailureError("build_adjustment_table: root not bracketed");
        for (int iter = 0; iter < config.max_bisect && hi - lo > config.tol_a; ++iter) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) > 0.0 ? lo : hi) = mid;
        }
        values[pi] = 0.5 * (lo + hi);
    });

    return AdjustmentTable(xi_lo, xi_step, std::move(values));
}

// ---------------------------------------------------------------------------
// parameter grids (heatmap experiments)

struct AdjustmentGridPoint {
    double p1 = 0.0;
    double p2 = 0.0;
    double a = 1.0;
};

// Multipliers over a (mu, sigma) grid for Gaussian fits. The same root
// stream is passed to every node, so all nodes share replicate substreams.
inline std::vector<AdjustmentGridPoint> adjustment_grid_normal(
    const RiskSpec& risk, std::size_t n, const BiasSearchConfig& config,
    const RandomStream& rng, std::span<const double> mus, std::span<const double> sigmas) {
    std::vector<AdjustmentGridPoint> grid(mus.size() * sigmas.size());
    parallel_for(grid.size(), [&](std::size_t idx) {
        const double mu = mus[idx / sigmas.size()];
        const double sigma = sigmas[idx % sigmas.size()];
        const auto adj = bootstrap_adjustment(Normal{mu, sigma}, risk,
                                              AdjustableEstimator::plug_in, n, config, rng);
        grid[idx] = {mu, sigma, adj.a};
    });
    return grid;
}

// Multipliers over a (xi, beta) grid for GPD tail fits at threshold u.
inline std::vector<AdjustmentGridPoint> adjustment_grid_gpd(
    const RiskSpec& risk, std::size_t n, const BiasSearchConfig& config,
    const RandomStream& rng, std::span<const double> xis, std::span<const double> betas,
    double u = 0.0) {
    if (!risk.conditional)
        throw ConfigError("adjustment_grid_gpd: GPD grids use conditional risk levels");
    std::vector<AdjustmentGridPoint> grid(xis.size() * betas.size());
    parallel_for(grid.size(), [&](std::size_t idx) {
        const double xi = xis[idx / betas.size()];
        const double beta = betas[idx % betas.size()];
        const auto adj = bootstrap_adjustment(GpdLeftTail{u, xi, beta, 1.0}, risk,
                                              AdjustableEstimator::plug_in, n, config, rng);
        grid[idx] = {xi, beta, adj.a};
    });
    return grid;
}

} // namespace riskbias
