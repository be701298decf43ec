#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskbias/bias.hpp"
#include "riskbias/distributions.hpp"
#include "riskbias/errors.hpp"
#include "riskbias/estimators.hpp"
#include "riskbias/math.hpp"
#include "riskbias/parallel.hpp"
#include "riskbias/risk.hpp"
#include "riskbias/rng.hpp"

namespace riskbias {

// ---------------------------------------------------------------------------
// performance statistics on secured positions y_t = x_t + rho_t

// Exception rate: fraction of days with a strictly negative secured position.
inline double stat_T(std::span<const double> y) {
    if (y.empty()) throw DomainError("stat_T: empty series");
    std::size_t breaches = 0;
    for (double v : y)
        if (v < 0.0) ++breaches;
    return static_cast<double>(breaches) / static_cast<double>(y.size());
}

// Average capital-weighted exception score (1/m) sum -(1{y<0} - alpha) y.
inline double stat_S(std::span<const double> y, double alpha) {
    if (y.empty()) throw DomainError("stat_S: empty series");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("stat_S: alpha in (0,1)");
    double s = 0.0;
    for (double v : y) s += ((v < 0.0 ? -1.0 : 0.0) + alpha) * v;
    return s / static_cast<double>(y.size());
}

// Shortfall coverage: fraction of ascending-sorted prefix sums that are
// negative. Equals the exact duality level of the expected-shortfall family.
inline double stat_G(std::span<const double> y) {
    if (y.empty()) throw DomainError("stat_G: empty series");
    std::vector<double> sorted(y.begin(), y.end());
    std::sort(sorted.begin(), sorted.end());
    double prefix = 0.0;
    std::size_t negative = 0;
    for (double v : sorted) {
        prefix += v;
        if (prefix < 0.0) ++negative;
    }
    return static_cast<double>(negative) / static_cast<double>(sorted.size());
}

// Loss share: sum of losses over sum of absolute moves. Exact zeros carry no
// mass, so they sit on the gain side by construction. A series with no moves
// at all has no losses, hence 0.
inline double stat_H(std::span<const double> y) {
    if (y.empty()) throw DomainError("stat_H: empty series");
    double loss = 0.0, profit = 0.0;
    for (double v : y) {
        if (v < 0.0) loss -= v;
        else profit += v;
    }
    const double total = loss + profit;
    if (total == 0.0) return 0.0;
    return loss / total;
}

// Smallest breach count that a binomial test at the given confidence flags
// as excessive over an N-day window.
inline long ngz_threshold(long window, double alpha, double confidence = 0.95) {
    if (window < 1) throw DomainError("ngz_threshold: window must be positive");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw DomainError("ngz_threshold: confidence in (0,1)");
    for (long k = 0; k <= window; ++k)
        if (binomial_cdf(window, alpha, k) >= confidence) return k;
    return window + 1;
}

// Fraction of sliding N-day windows whose breach count reaches the binomial
// rejection threshold.
inline double stat_NGZ(std::span<const double> y, double alpha, long window = 50,
                       double confidence = 0.95) {
    const long m = static_cast<long>(y.size());
    if (m < window) throw DomainError("stat_NGZ: series shorter than the window");
    const long z = ngz_threshold(window, alpha, confidence);
    long breaches = 0;
    for (long t = 0; t < window; ++t)
        if (y[static_cast<std::size_t>(t)] < 0.0) ++breaches;
    long flagged = breaches >= z ? 1 : 0;
    for (long t = window; t < m; ++t) {
        if (y[static_cast<std::size_t>(t)] < 0.0) ++breaches;
        if (y[static_cast<std::size_t>(t - window)] < 0.0) --breaches;
        if (breaches >= z) ++flagged;
    }
    return static_cast<double>(flagged) / static_cast<double>(m - window + 1);
}

struct DmResult {
    double stat = 0.0;
    double p_value = 1.0;
    bool degenerate = false;
};

// Diebold-Mariano comparison on the per-day exception scores; positive values
// mean the second series scores worse. p-value is two-sided normal.
inline DmResult stat_DM(std::span<const double> y_first, std::span<const double> y_second,
                        double alpha) {
    if (y_first.size() != y_second.size() || y_first.empty())
        throw DomainError("stat_DM: series must be nonempty and equally long");
    const std::size_t m = y_first.size();
    const auto score = [alpha](double v) { return ((v < 0.0 ? -1.0 : 0.0) + alpha) * v; };
    double mean = 0.0;
    for (std::size_t t = 0; t < m; ++t) mean += score(y_second[t]) - score(y_first[t]);
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        const double d = score(y_second[t]) - score(y_first[t]) - mean;
        ss += d * d;
    }
    DmResult r;
    if (m < 2 || ss == 0.0) {
        if (mean == 0.0) return {0.0, 1.0, false};
        r.stat = mean > 0.0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        r.degenerate = true;
        return r;
    }
    const double sd = std::sqrt(ss / static_cast<double>(m - 1));
    r.stat = std::sqrt(static_cast<double>(m)) * mean / sd;
    r.p_value = std::erfc(std::fabs(r.stat) / std::sqrt(2.0));
    return r;
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

inline MeanSd mr_sd(std::span<const double> rho) {
    if (rho.empty()) throw DomainError("mr_sd: empty series");
    MeanSd out;
    out.mean = sample_mean(rho);
    out.sd = rho.size() > 1 ? sample_sd(rho) : 0.0;
    return out;
}

// Smallest level at which the empirical risk of the series is acceptable,
// inf{alpha : R_alpha^emp(y) <= 0}. Closed forms per family: breach rate for
// value-at-risk, negative-prefix share for expected shortfall, loss share for
// expectiles.
inline double dual_level(std::span<const double> y, RiskKind kind) {
    switch (kind) {
        case RiskKind::var: return stat_T(y);
        case RiskKind::es: return stat_G(y);
        case RiskKind::evar: return stat_H(y);
    }
    throw ConfigError("dual_level: unknown risk kind");
}

enum class TrafficZone { green, yellow, red };

// Regulatory traffic-light zones on the exception rate.
inline TrafficZone traffic_zone(double exception_rate) {
    if (exception_rate < 0.02) return TrafficZone::green;
    if (exception_rate < 0.04) return TrafficZone::yellow;
    return TrafficZone::red;
}

// ---------------------------------------------------------------------------
// rolling backtest

enum class EstimatorKind {
    true_risk,   // generating law priced exactly (GARCH: conditional volatility)
    plug_in,     // refit the parametric family each window
    unbiased,    // Gaussian predictive-quantile / rescaled-shortfall estimator
    empirical,   // window quantile / tail mean / sample expectile
    b_benchmark, // plug-in rescaled by one multiplier fitted at the true law
    b_rolling    // plug-in rescaled per window at the fitted shape
};

inline std::string estimator_label(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::true_risk: return "true";
        case EstimatorKind::plug_in: return "plug-in";
        case EstimatorKind::unbiased: return "unbiased";
        case EstimatorKind::empirical: return "empirical";
        case EstimatorKind::b_benchmark: return "b-true";
        case EstimatorKind::b_rolling: return "b";
    }
    return "?";
}

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::plug_in;
    // empirical estimator interpolation; figures use the interpolated method
    QuantileMethod quantile_method = QuantileMethod::interpolated;
    // settings for the bootstrap estimators (b-true, b)
    BiasSearchConfig bias;
    bool use_memo_table = true;   // b: shape-indexed multiplier table vs direct search
    double outlier_quantile = 0.90; // b: plug-in capitals above this quantile keep a = 1
    // shape grid of the memo table; NaN bounds fall back to [-0.5, 1.5] for
    // quantile capital and cap at 0.6 for shortfall capital, which is
    // undefined for fitted shapes >= 1
    double table_xi_lo = std::numeric_limits<double>::quiet_NaN();
    double table_xi_hi = std::numeric_limits<double>::quiet_NaN();
    double table_xi_step = 0.01;
    // GARCH plug-in: refit every k-th window, roll the variance recursion
    // forward with frozen parameters in between
    std::size_t garch_refit_stride = 1;
};

struct BacktestData {
    std::vector<double> x;      // n + m observations
    std::vector<double> sigma;  // GARCH only: conditional volatility per index
};

struct BacktestConfig {
    DistributionSpec law;
    RiskSpec risk;
    std::size_t window_n = 250;
    EstimatorSpec estimator;
};

struct SecuredSeries {
    std::vector<double> x;   // realized P&L per scored day
    std::vector<double> rho; // capital posted for that day
    std::vector<double> y;   // secured position x + rho
    std::size_t fit_failures = 0;
};

// Draws the observation stream a rolling backtest consumes: n + m i.i.d.
// observations, conditional tail draws for GPD models, a full path (with the
// volatility series) for GARCH.
inline BacktestData make_backtest_data(const DistributionSpec& law, std::size_t n,
                                       std::size_t m, RandomStream rng) {
    BacktestData data;
    if (const auto* g = std::get_if<Garch11>(&law)) {
        auto path = garch_simulate(*g, n + m, rng);
        data.x = std::move(path.x);
        data.sigma = std::move(path.sigma);
        return data;
    }
    const bool conditional = std::holds_alternative<GpdLeftTail>(law);
    data.x = sample_iid(law, n + m, rng,
                        conditional ? GpdSampling::conditional : GpdSampling::unconditional);
    return data;
}

namespace detail {

// Rolls fit_window over the data with the reuse-previous policy on fit
// failures: a window whose fit throws inherits the last successful capital.
template <class Fn>
void roll_windows(const BacktestData& data, std::size_t n, SecuredSeries& out, Fn&& fit_window) {
    const std::size_t m = data.x.size() - n;
    std::vector<char> ok(m, 0);
    parallel_for(m, [&](std::size_t t) {
        const std::span<const double> window(data.x.data() + t, n);
        try {
            out.rho[t] = fit_window(t, window);
            ok[t] = 1;
        } catch (const Error&) {
            ok[t] = 0;
        }
    });
    for (std::size_t t = 0; t < m; ++t) {
        if (ok[t]) continue;
        ++out.fit_failures;
        if (t == 0) {
            // no earlier capital to reuse; surface the original failure
            const std::span<const double> window(data.x.data(), n);
            fit_window(0, window);
            throw FitFailureError("run_backtest: first window failed to fit");
        }
        out.rho[t] = out.rho[t - 1];
    }
}

} // namespace detail

inline SecuredSeries run_backtest(const BacktestData& data, const BacktestConfig& config,
                                  const RandomStream& rng) {
    const std::size_t n = config.window_n;
    if (n < 2 || data.x.size() <= n)
        throw ConfigError("run_backtest: need window_n >= 2 and data longer than one window");
    const std::size_t m = data.x.size() - n;
    const RiskSpec& risk = config.risk;
    detail::check_level(risk);

    SecuredSeries out;
    out.rho.resize(m);
    out.x.assign(data.x.begin() + static_cast<std::ptrdiff_t>(n), data.x.end());

    const auto* gpd = std::get_if<GpdLeftTail>(&config.law);
    const auto* garch = std::get_if<Garch11>(&config.law);
    const auto* student = std::get_if<StudentT>(&config.law);
    if (gpd && !risk.conditional)
        throw ConfigError("run_backtest: GPD tail backtests use conditional risk levels");

    switch (config.estimator.kind) {
        case EstimatorKind::true_risk: {
            if (garch) {
                if (data.sigma.size() != data.x.size())
                    throw ConfigError("run_backtest: GARCH data lacks the volatility path");
                if (risk.kind != RiskKind::var)
                    throw UnsupportedError("run_backtest: GARCH prices value-at-risk only");
                for (std::size_t t = 0; t < m; ++t)
                    out.rho[t] = garch_true_var(*garch, data.sigma[n + t], risk.level);
            } else {
                const double cap = risk_true(config.law, risk);
                std::fill(out.rho.begin(), out.rho.end(), cap);
            }
            break;
        }
        case EstimatorKind::plug_in: {
            if (garch) {
                if (risk.kind != RiskKind::var)
                    throw UnsupportedError("run_backtest: GARCH prices value-at-risk only");
                const std::size_t stride = std::max<std::size_t>(1, config.estimator.garch_refit_stride);
                if (stride == 1) {
                    detail::roll_windows(data, n, out, [&](std::size_t, std::span<const double> w) {
                        const GarchFit fit = fit_garch_qmle(w, sample_sd(w));
                        return risk_plugin(fit, risk);
                    });
                } else {
                    // sequential: the variance recursion carries across windows
                    GarchFit fit;
                    bool have_fit = false;
                    for (std::size_t t = 0; t < m; ++t) {
                        const std::span<const double> w(data.x.data() + t, n);
                        bool refitted = false;
                        if (t % stride == 0 || !have_fit) {
                            try {
                                fit = fit_garch_qmle(w, sample_sd(w));
                                have_fit = true;
                                refitted = true;
                            } catch (const Error&) {
                                ++out.fit_failures;
                                if (!have_fit)
                                    throw FitFailureError(
                                        "run_backtest: first window failed to fit");
                            }
                        }
                        if (!refitted)
                            fit.sigma_next =
                                std::sqrt(fit.omega + fit.alpha * w.back() * w.back() +
                                          fit.beta * fit.sigma_next * fit.sigma_next);
                        out.rho[t] = risk_plugin(fit, risk);
                    }
                }
            } else if (gpd) {
                detail::roll_windows(data, n, out, [&](std::size_t, std::span<const double> w) {
                    return risk_plugin(fit_gpd_pwm(w, gpd->u), risk);
                });
            } else if (student) {
                if (risk.kind != RiskKind::evar)
                    throw UnsupportedError(
                        "run_backtest: Student-t plug-in capital provided for expectiles only");
                const double nu = student->nu;
                const double e0 = expectile_solve(StudentT{nu, 0.0, 1.0}, risk.level);
                detail::roll_windows(data, n, out, [&](std::size_t, std::span<const double> w) {
                    const GaussianFit moments = fit_gaussian(w);
                    const double scale = moments.sigma * std::sqrt((nu - 2.0) / nu);
                    return -(moments.mu + scale * e0);
                });
            } else {
                // precompute the standardized expectile once for the whole roll
                const double e0 = risk.kind == RiskKind::evar
                                      ? expectile_solve(Normal{0.0, 1.0}, risk.level)
                                      : 0.0;
                detail::roll_windows(data, n, out, [&](std::size_t, std::span<const double> w) {
                    const GaussianFit fit = fit_gaussian(w);
                    if (risk.kind == RiskKind::evar) return -(fit.mu + fit.sigma * e0);
                    return risk_plugin(fit, risk);
                });
            }
            break;
        }
        case EstimatorKind::unbiased: {
            if (!std::holds_alternative<Normal>(config.law))
                throw UnsupportedError("run_backtest: unbiased estimator requires Gaussian data");
            if (risk.kind == RiskKind::var) {
                detail::roll_windows(data, n, out, [&](std::size_t, std::span<const double> w) {
                    return var_unbiased_gaussian(fit_gaussian(w), risk.level);
                });
            } else if (risk.kind == RiskKind::es) {
                const double c = (n == 250) ? kEsMultiplier250
                                            : es_unbiased_multiplier(n, risk.level, 400000,
                                                                     0x5eedULL);
                detail::roll_windows(data, n, out, [&](std::size_t, std::span<const double> w) {
                    return es_unbiased_gaussian(fit_gaussian(w), risk.level, c);
                });
            } else {
                throw UnsupportedError("run_backtest: no unbiased expectile estimator");
            }
            break;
        }
        case EstimatorKind::empirical: {
            const QuantileMethod method = config.estimator.quantile_method;
            detail::roll_windows(data, n, out, [&](std::size_t, std::span<const double> w) {
                return risk_empirical(w, risk, method);
            });
            break;
        }
        case EstimatorKind::b_benchmark: {
            if (!gpd)
                throw UnsupportedError("run_backtest: bootstrap estimators are for GPD tails");
            const auto adj = bootstrap_adjustment(config.law, risk, AdjustableEstimator::plug_in,
                                                  n, config.estimator.bias, rng.substream(0));
            detail::roll_windows(data, n, out, [&](std::size_t, std::span<const double> w) {
                return adjusted_estimate(fit_gpd_pwm(w, gpd->u), risk, adj.a);
            });
            break;
        }
        case EstimatorKind::b_rolling: {
            if (!gpd)
                throw UnsupportedError("run_backtest: bootstrap estimators are for GPD tails");
            // pass 1: plug-in fits
            std::vector<double> plugin_cap(m);
            std::vector<double> xi_hat(m);
            std::vector<char> ok(m, 0);
            parallel_for(m, [&](std::size_t t) {
                const std::span<const double> window(data.x.data() + t, n);
                try {
                    const GpdFit fit = fit_gpd_pwm(window, gpd->u);
                    plugin_cap[t] = risk_plugin(fit, risk);
                    xi_hat[t] = fit.xi;
                    ok[t] = 1;
                } catch (const Error&) {
                    ok[t] = 0;
                }
            });
            for (std::size_t t = 0; t < m; ++t) {
                if (ok[t]) continue;
                ++out.fit_failures;
                if (t == 0) throw FitFailureError("run_backtest: first window failed to fit");
                plugin_cap[t] = plugin_cap[t - 1];
                xi_hat[t] = xi_hat[t - 1];
            }
            // pass 2: outlier guard threshold over the whole capital sample
            const double guard = empirical_quantile(plugin_cap, config.estimator.outlier_quantile,
                                                    QuantileMethod::order_statistic);
            const RandomStream boot = rng.substream(0);
            std::optional<AdjustmentTable> table;
            if (config.estimator.use_memo_table) {
                double xi_lo = config.estimator.table_xi_lo;
                double xi_hi = config.estimator.table_xi_hi;
                if (std::isnan(xi_lo)) xi_lo = -0.5;
                if (std::isnan(xi_hi)) xi_hi = risk.kind == RiskKind::es ? 0.6 : 1.5;
                table = build_adjustment_table(risk, n, config.estimator.bias, boot, xi_lo,
                                               xi_hi, config.estimator.table_xi_step);
            }
            parallel_for(m, [&](std::size_t t) {
                double a = 1.0;
                if (plugin_cap[t] <= guard) {
                    if (table) {
                        a = table->lookup(xi_hat[t]);
                    } else {
                        GpdLeftTail at_fit = *gpd;
                        at_fit.xi = xi_hat[t];
                        const auto adj =
                            bootstrap_adjustment(DistributionSpec{at_fit}, risk,
                                                 AdjustableEstimator::plug_in, n,
                                                 config.estimator.bias, boot);
                        a = adj.a;
                    }
                }
                out.rho[t] = -gpd->u + a * (plugin_cap[t] + gpd->u);
            });
            break;
        }
    }

    out.y.resize(m);
    for (std::size_t t = 0; t < m; ++t) out.y[t] = out.x[t] + out.rho[t];
    return out;
}

// ---------------------------------------------------------------------------
// report

struct BacktestReport {
    std::string estimator;
    double T = 0.0;
    double S = 0.0;
    double G = 0.0;
    double H = 0.0;
    std::optional<double> NGZ;
    std::optional<double> DM;
    std::optional<double> DM_p;
    double MR = 0.0;
    double SD = 0.0;
    std::optional<TrafficZone> zone; // regulatory zone, defined for m = 250
    std::size_t fit_failures = 0;
};

inline BacktestReport make_report(const SecuredSeries& series, const RiskSpec& risk,
                                  long ngz_window = 50, double ngz_confidence = 0.95) {
    BacktestReport report;
    report.T = stat_T(series.y);
    report.S = stat_S(series.y, risk.level);
    report.G = stat_G(series.y);
    report.H = stat_H(series.y);
    if (static_cast<long>(series.y.size()) >= ngz_window)
        report.NGZ = stat_NGZ(series.y, risk.level, ngz_window, ngz_confidence);
    const MeanSd ms = mr_sd(series.rho);
    report.MR = ms.mean;
    report.SD = ms.sd;
    if (series.y.size() == 250) report.zone = traffic_zone(report.T);
    report.fit_failures = series.fit_failures;
    return report;
}

} // namespace riskbias
