#include <catch2/catch_amalgamated.hpp>

#include <riskbias/distributions.hpp>
#include <riskbias/errors.hpp>
#include <riskbias/rng.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace riskbias;

namespace {

template <class Cdf>
double ks_statistic(std::vector<double> sample, const Cdf& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

} // namespace

TEST_CASE("cdf and quantile invert for every law") {
    const std::vector<DistributionSpec> specs = {
        Normal{-1.0, 2.5},
        StudentT{5.0, 0.3, 1.7},
        GpdLeftTail{-0.978, 0.212, 0.869, 1.0},
        GpdLeftTail{-1.0, 0.05, 0.7, 0.2},   // mixed law with mass above u
        GpdLeftTail{0.5, -0.3, 1.2, 0.6},    // bounded tail, xi < 0
        GpdLeftTail{0.0, 0.0, 1.0, 0.35},    // exponential boundary case
    };
    for (const auto& spec : specs) {
        for (double q = 0.001; q < 1.0; q += 0.0331) {
            const double x = dist_quantile(spec, q);
            INFO("q = " << q << " x = " << x);
            CHECK(dist_cdf(spec, x) == Catch::Approx(q).margin(1e-10));
        }
    }
}

TEST_CASE("gpd mixed cdf is continuous at the threshold and uses tail mass p") {
    const GpdLeftTail g{-1.0, 0.05, 0.7, 0.2};
    CHECK(dist_cdf(DistributionSpec{g}, g.u) == Catch::Approx(g.p).margin(1e-14));
    CHECK(dist_cdf(DistributionSpec{g}, g.u + 1e-9) ==
          Catch::Approx(g.p).margin(1e-8));
    CHECK(dist_cdf(DistributionSpec{g}, g.u - 1e-9) ==
          Catch::Approx(g.p).margin(1e-8));
}

TEST_CASE("iid sampling reproduces the target law") {
    RandomStream rng(2024);

    SECTION("standard normal, Kolmogorov-Smirnov") {
        const std::size_t n = 1000000;
        auto xs = sample_iid(Normal{0.0, 1.0}, n, rng);
        const double d = ks_statistic(std::move(xs), [](double x) {
            return oracle::normal_cdf(x);
        });
        CHECK(d < 2.0 / std::sqrt(static_cast<double>(n)));
    }

    SECTION("student t with location and scale") {
        const std::size_t n = 200000;
        const StudentT law{5.0, 0.3, 1.7};
        auto xs = sample_iid(DistributionSpec{law}, n, rng);
        const double d = ks_statistic(std::move(xs), [&](double x) {
            return dist_cdf(DistributionSpec{law}, x);
        });
        CHECK(d < 2.0 / std::sqrt(static_cast<double>(n)));
    }

    SECTION("gpd unconditional mixes tail and body with mass p") {
        const GpdLeftTail g{-1.0, 0.05, 0.7, 0.2};
        const std::size_t n = 400000;
        auto xs = sample_iid(DistributionSpec{g}, n, rng);
        const double below =
            static_cast<double>(std::count_if(xs.begin(), xs.end(),
                                              [&](double x) { return x <= g.u; })) /
            static_cast<double>(n);
        CHECK(below == Catch::Approx(g.p).margin(0.004));
        const double d = ks_statistic(std::move(xs), [&](double x) {
            return dist_cdf(DistributionSpec{g}, x);
        });
        CHECK(d < 2.0 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("conditional gpd sampling stays below the threshold") {
    const GpdLeftTail g{-0.978, 0.212, 0.869, 1.0};
    RandomStream rng(7);
    const std::size_t n = 200000;
    auto xs = sample_iid(DistributionSpec{g}, n, rng, GpdSampling::conditional);
    for (double x : xs) REQUIRE(x <= g.u);
    // conditional cdf: P(X <= x | X <= u) = survival of the excess at u - x
    const double d = ks_statistic(std::move(xs), [&](double x) {
        return detail::gpd_excess_survival(g.xi, g.beta, g.u - x);
    });
    CHECK(d < 2.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("same seed reproduces the same sample") {
    RandomStream a(99), b(99);
    const auto xa = sample_iid(Normal{0.0, 1.0}, 1000, a);
    const auto xb = sample_iid(Normal{0.0, 1.0}, 1000, b);
    CHECK(xa == xb);
}

TEST_CASE("partial moments match frozen references") {
    // E[(X - 1)+] for standard normal, mpmath reference
    CHECK(partial_moment(Normal{0.0, 1.0}, 1.0, MomentSide::above) ==
          Catch::Approx(0.0833154705876862984).margin(1e-12));
    // E[T+] for standard t with five degrees of freedom
    CHECK(partial_moment(StudentT{5.0, 0.0, 1.0}, 0.0, MomentSide::above) ==
          Catch::Approx(0.474508362278118039).margin(1e-10));
}

TEST_CASE("partial moments match quadrature of the cdf") {
    // E[(t - X)+] equals the integral of the cdf below t
    struct Case {
        DistributionSpec spec;
        double threshold;
        double lo;     // quadrature cut
        double remain; // analytic bound/value of the integral below lo
    };
    const GpdLeftTail ds1{-0.978, 0.212, 0.869, 1.0};
    // integral of the gpd lower-tail cdf below L has the closed form
    //   p * beta/(1-xi) * (1 + xi (u - L)/beta)^(1 - 1/xi)
    const auto gpd_rest = [&](double L) {
        return ds1.p * ds1.beta / (1.0 - ds1.xi) *
               std::pow(1.0 + ds1.xi * (ds1.u - L) / ds1.beta, 1.0 - 1.0 / ds1.xi);
    };
    const std::vector<Case> cases = {
        {Normal{0.3, 1.4}, -2.0, -12.0, 0.0},
        {Normal{0.3, 1.4}, 1.5, -12.0, 0.0},
        {StudentT{5.0, 0.0, 1.0}, 0.5, -500.0, 0.0},
        {DistributionSpec{ds1}, ds1.u, ds1.u - 4000.0, gpd_rest(ds1.u - 4000.0)},
        {DistributionSpec{ds1}, -2.5, ds1.u - 4000.0, gpd_rest(ds1.u - 4000.0)},
    };
    for (const auto& c : cases) {
        const double quad = oracle::integrate(
            [&](double x) { return dist_cdf(c.spec, x); }, c.lo, c.threshold, 1e-11);
        const double below = partial_moment(c.spec, c.threshold, MomentSide::below);
        INFO("threshold = " << c.threshold);
        CHECK(below == Catch::Approx(quad + c.remain).margin(5e-7));
        // the two sides differ by mean - threshold
        const double above = partial_moment(c.spec, c.threshold, MomentSide::above);
        CHECK(above - below ==
              Catch::Approx(dist_mean(c.spec) - c.threshold).margin(1e-10));
    }
}

TEST_CASE("distribution means") {
    CHECK(dist_mean(Normal{0.7, 2.0}) == 0.7);
    CHECK(dist_mean(StudentT{5.0, -0.2, 3.0}) == -0.2);
    // conditional-law mean u - beta/(1 - xi), frozen reference
    CHECK(dist_mean(GpdLeftTail{-0.978, 0.212, 0.869, 1.0}) ==
          Catch::Approx(-2.080791878).margin(1e-8));
    CHECK(dist_mean(GpdLeftTail{-2.200, 0.388, 0.545, 1.0}) ==
          Catch::Approx(-3.090522876).margin(1e-8));
    CHECK_THROWS_AS(dist_mean(StudentT{1.0, 0.0, 1.0}), InfiniteMomentError);
    CHECK_THROWS_AS(dist_mean(GpdLeftTail{0.0, 1.19, 0.774, 1.0}), InfiniteMomentError);
    CHECK_THROWS_AS(dist_mean(Garch11{}), UnsupportedError);
}

TEST_CASE("unsupported and ill-posed requests throw") {
    RandomStream rng(1);
    CHECK_THROWS_AS(sample_iid(Garch11{}, 10, rng), UnsupportedError);
    CHECK_THROWS_AS(partial_moment(Garch11{}, 0.0, MomentSide::below), UnsupportedError);
    CHECK_THROWS_AS(partial_moment(StudentT{1.0, 0.0, 1.0}, 0.0, MomentSide::below),
                    InfiniteMomentError);
    CHECK_THROWS_AS(partial_moment(GpdLeftTail{0.0, 1.2, 1.0, 1.0}, -1.0, MomentSide::below),
                    InfiniteMomentError);
    CHECK_THROWS_AS(dist_quantile(Normal{0.0, 1.0}, 0.0), DomainError);
    CHECK_THROWS_AS(dist_quantile(Normal{0.0, 1.0}, 1.0), DomainError);
    CHECK_THROWS_AS(dist_cdf(Normal{0.0, -1.0}, 0.0), DomainError);
    CHECK_THROWS_AS(sample_iid(GpdLeftTail{0.0, 0.1, -1.0, 1.0}, 5, rng), DomainError);
}

TEST_CASE("garch simulation recursion") {
    RandomStream rng(5);

    SECTION("first step uses the initial volatility") {
        const Garch11 g{0.0, 1e-4, 0.1, 0.8, 0.01};
        auto path = garch_simulate(g, 10, rng);
        CHECK(path.sigma[0] == g.sigma_init);
        CHECK(path.x.size() == 10);
        CHECK(path.sigma.size() == 10);
    }

    SECTION("with alpha = beta = 0 volatility collapses to sqrt(omega)") {
        const Garch11 g{0.0, 0.04, 0.0, 0.0, 0.7};
        auto path = garch_simulate(g, 50, rng);
        CHECK(path.sigma[0] == 0.7);
        for (std::size_t t = 1; t < path.sigma.size(); ++t)
            CHECK(path.sigma[t] == Catch::Approx(0.2).margin(1e-14));
    }

    SECTION("squared volatility follows the stated recursion") {
        const Garch11 g{0.001, 1e-4, 0.1, 0.8, 0.01};
        auto path = garch_simulate(g, 200, rng);
        for (std::size_t t = 1; t < path.sigma.size(); ++t) {
            const double expected = g.omega + g.alpha * path.x[t - 1] * path.x[t - 1] +
                                    g.beta * path.sigma[t - 1] * path.sigma[t - 1];
            CHECK(path.sigma[t] * path.sigma[t] == Catch::Approx(expected).margin(1e-14));
        }
    }

    SECTION("long-run mean of squared returns matches omega/(1-alpha-beta)") {
        const Garch11 g{0.0, 1e-4, 0.1, 0.8, 0.01};
        auto path = garch_simulate(g, 1000000, rng);
        double s2 = 0.0;
        for (double x : path.x) s2 += x * x;
        s2 /= static_cast<double>(path.x.size());
        CHECK(s2 == Catch::Approx(g.omega / (1.0 - g.alpha - g.beta)).epsilon(0.05));
    }

    SECTION("invalid parameters throw") {
        CHECK_THROWS_AS(garch_simulate(Garch11{0.0, 0.0, 0.1, 0.8, 0.01}, 5, rng),
                        DomainError);
        CHECK_THROWS_AS(garch_simulate(Garch11{0.0, 1e-4, 0.1, 0.8, 0.0}, 5, rng),
                        DomainError);
    }
}
