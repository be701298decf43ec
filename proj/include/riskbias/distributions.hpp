#pragma once

#include <cmath>
#include <cstdint>
#include <variant>
#include <vector>

#include "riskbias/errors.hpp"
#include "riskbias/math.hpp"
#include "riskbias/rng.hpp"

namespace riskbias {

struct Normal {
    double mu = 0.0;
    double sigma = 1.0;
};

struct StudentT {
    double nu = 5.0;
    double loc = 0.0;
    double scale = 1.0;
};

// Loss model with a generalized Pareto lower tail: below the threshold u the
// law is X = u - Z with Z ~ GPD(xi, beta) and total tail mass p. The mass
// 1 - p above u is completed with an exponential(beta) right tail so that the
// full cdf/quantile pair is well defined; every risk level used downstream
// stays inside the GPD tail.
struct GpdLeftTail {
    double u = 0.0;
    double xi = 0.0;
    double beta = 1.0;
    double p = 1.0;
};

struct Garch11 {
    double mu = 0.0;
    double omega = 1e-4;
    double alpha = 0.1;
    double beta = 0.8;
    double sigma_init = 0.01;
};

using DistributionSpec = std::variant<Normal, StudentT, GpdLeftTail, Garch11>;

enum class GpdSampling { unconditional, conditional };

namespace detail {

inline void check_gpd(const GpdLeftTail& g) {
    if (!(g.beta > 0.0)) throw DomainError("GpdLeftTail: beta must be positive");
    if (!(g.p > 0.0 && g.p <= 1.0)) throw DomainError("GpdLeftTail: p must lie in (0, 1]");
}

// Quantile of the excess law Z ~ GPD(xi, beta) at probability q in (0, 1).
inline double gpd_excess_quantile(double xi, double beta, double q) {
    const double l = -std::log1p(-q);
    if (std::fabs(xi) < 1e-12) return beta * l;
    return beta * std::expm1(xi * l) / xi;
}

// Survival (1 - cdf) of Z ~ GPD(xi, beta) at z >= 0.
inline double gpd_excess_survival(double xi, double beta, double z) {
    if (z <= 0.0) return 1.0;
    if (std::fabs(xi) < 1e-12) return std::exp(-z / beta);
    const double base = 1.0 + xi * z / beta;
    if (base <= 0.0) return 0.0; // beyond the finite endpoint (xi < 0)
    return std::pow(base, -1.0 / xi);
}

} // namespace detail

inline double dist_cdf(const DistributionSpec& spec, double x) {
    return std::visit(
        [&](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Normal>) {
                if (!(law.sigma > 0.0)) throw DomainError("Normal: sigma must be positive");
                return norm_cdf((x - law.mu) / law.sigma);
            } else if constexpr (std::is_same_v<T, StudentT>) {
                if (!(law.scale > 0.0)) throw DomainError("StudentT: scale must be positive");
                return student_t_cdf((x - law.loc) / law.scale, law.nu);
            } else if constexpr (std::is_same_v<T, GpdLeftTail>) {
                detail::check_gpd(law);
                if (x <= law.u)
                    return law.p * detail::gpd_excess_survival(law.xi, law.beta, law.u - x);
                return law.p + (1.0 - law.p) * (-std::expm1(-(x - law.u) / law.beta));
            } else {
                throw UnsupportedError("dist_cdf: GARCH has no unconditional cdf here");
            }
        },
        spec);
}

inline double dist_quantile(const DistributionSpec& spec, double q) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("dist_quantile: q must lie in (0, 1)");
    return std::visit(
        [&](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Normal>) {
                if (!(law.sigma > 0.0)) throw DomainError("Normal: sigma must be positive");
                return law.mu + law.sigma * norm_quantile(q);
            } else if constexpr (std::is_same_v<T, StudentT>) {
                if (!(law.scale > 0.0)) throw DomainError("StudentT: scale must be positive");
                return law.loc + law.scale * student_t_quantile(q, law.nu);
            } else if constexpr (std::is_same_v<T, GpdLeftTail>) {
                detail::check_gpd(law);
                if (q <= law.p) {
                    // Solve p * survival(u - x) = q on the tail side.
                    const double l = std::log(law.p / q);
                    double z;
                    if (std::fabs(law.xi) < 1e-12) z = law.beta * l;
                    else z = law.beta * std::expm1(law.xi * l) / law.xi;
                    return law.u - z;
                }
                return law.u - law.beta * std::log((1.0 - q) / (1.0 - law.p));
            } else {
                throw UnsupportedError("dist_quantile: GARCH has no unconditional quantile here");
            }
        },
        spec);
}

// Quantile of the conditional law X | X <= u for the GPD tail model.
inline double gpd_conditional_quantile(const GpdLeftTail& g, double q) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("gpd_conditional_quantile: q must lie in (0, 1)");
    detail::check_gpd(g);
    const double l = -std::log(q);
    double z;
    if (std::fabs(g.xi) < 1e-12) z = g.beta * l;
    else z = g.beta * std::expm1(g.xi * l) / g.xi;
    return g.u - z;
}

// I.i.d. draws by inverse transform. For the GPD tail model the conditional
// mode draws from X | X <= u, which is what tail-level backtests consume.
inline std::vector<double> sample_iid(const DistributionSpec& spec, std::size_t count,
                                      RandomStream& rng,
                                      GpdSampling mode = GpdSampling::unconditional) {
    std::vector<double> out(count);
    if (std::holds_alternative<Garch11>(spec))
        throw UnsupportedError("sample_iid: GARCH is a path model, use garch_simulate");
    if (const auto* g = std::get_if<GpdLeftTail>(&spec); g && mode == GpdSampling::conditional) {
        detail::check_gpd(*g);
        for (auto& x : out)
            x = g->u - detail::gpd_excess_quantile(g->xi, g->beta, rng.next_uniform());
        return out;
    }
    for (auto& x : out) x = dist_quantile(spec, rng.next_uniform());
    return out;
}

struct GarchPath {
    std::vector<double> x;     // observations
    std::vector<double> sigma; // conditional volatility used at each step
};

// Simulates x_t = mu + sigma_t eps_t with
// sigma_t^2 = omega + alpha x_{t-1}^2 + beta sigma_{t-1}^2, starting from
// sigma_init. The squared-return recursion uses raw observations.
inline GarchPath garch_simulate(const Garch11& g, std::size_t steps, RandomStream& rng) {
    if (!(g.omega > 0.0) || g.alpha < 0.0 || g.beta < 0.0)
        throw DomainError("garch_simulate: need omega > 0, alpha >= 0, beta >= 0");
    if (!(g.sigma_init > 0.0)) throw DomainError("garch_simulate: sigma_init must be positive");
    GarchPath path;
    path.x.resize(steps);
    path.sigma.resize(steps);
    double sigma = g.sigma_init;
    double prev_x = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        if (t > 0)
            sigma = std::sqrt(g.omega + g.alpha * prev_x * prev_x + g.beta * sigma * sigma);
        path.sigma[t] = sigma;
        const double eps = norm_quantile(rng.next_uniform());
        prev_x = g.mu + sigma * eps;
        path.x[t] = prev_x;
    }
    return path;
}

enum class MomentSide { below, above };

// Partial first moments E[(t - X)+] (below) and E[(X - t)+] (above).
inline double partial_moment(const DistributionSpec& spec, double threshold, MomentSide side) {
    return std::visit(
        [&](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Normal>) {
                if (!(law.sigma > 0.0)) throw DomainError("Normal: sigma must be positive");
                const double z = (threshold - law.mu) / law.sigma;
                const double below = (threshold - law.mu) * norm_cdf(z) + law.sigma * norm_pdf(z);
                if (side == MomentSide::below) return below;
                return below + law.mu - threshold;
            } else if constexpr (std::is_same_v<T, StudentT>) {
                if (!(law.scale > 0.0)) throw DomainError("StudentT: scale must be positive");
                if (!(law.nu > 1.0))
                    throw InfiniteMomentError("StudentT partial moment needs nu > 1");
                const double z = (threshold - law.loc) / law.scale;
                const double above_std = student_t_pdf(z, law.nu) * (law.nu + z * z) / (law.nu - 1.0) -
                                         z * (1.0 - student_t_cdf(z, law.nu));
                const double above = law.scale * above_std;
                if (side == MomentSide::above) return above;
                return above + threshold - law.loc;
            } else if constexpr (std::is_same_v<T, GpdLeftTail>) {
                detail::check_gpd(law);
                if (!(law.xi < 1.0))
                    throw InfiniteMomentError("GpdLeftTail partial moment needs xi < 1");
                const auto below_at = [&](double t) -> double {
                    // integral of the cdf over (-inf, t], t <= u
                    const double s = law.u - t;
                    double tail;
                    if (std::fabs(law.xi) < 1e-12) {
                        tail = std::exp(-s / law.beta);
                    } else {
                        const double base = 1.0 + law.xi * s / law.beta;
                        if (base <= 0.0) return 0.0;
                        tail = std::pow(base, 1.0 - 1.0 / law.xi);
                    }
                    return law.p * law.beta / (1.0 - law.xi) * tail;
                };
                double below;
                if (threshold <= law.u) {
                    below = below_at(threshold);
                } else {
                    const double d = threshold - law.u;
                    below = below_at(law.u) + law.p * d +
                            (1.0 - law.p) * (d - law.beta * (-std::expm1(-d / law.beta)));
                }
                if (side == MomentSide::below) return below;
                const double mean = law.u - law.p * law.beta / (1.0 - law.xi) +
                                    (1.0 - law.p) * law.beta;
                return below + mean - threshold;
            } else {
                throw UnsupportedError("partial_moment: not defined for GARCH");
            }
        },
        spec);
}

inline double dist_mean(const DistributionSpec& spec) {
    return std::visit(
        [&](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Normal>) {
                return law.mu;
            } else if constexpr (std::is_same_v<T, StudentT>) {
                if (!(law.nu > 1.0)) throw InfiniteMomentError("StudentT mean needs nu > 1");
                return law.loc;
            } else if constexpr (std::is_same_v<T, GpdLeftTail>) {
                detail::check_gpd(law);
                if (!(law.xi < 1.0)) throw InfiniteMomentError("GpdLeftTail mean needs xi < 1");
                return law.u - law.p * law.beta / (1.0 - law.xi) + (1.0 - law.p) * law.beta;
            } else {
                throw UnsupportedError("dist_mean: not defined for GARCH");
            }
        },
        spec);
}

} // namespace riskbias
