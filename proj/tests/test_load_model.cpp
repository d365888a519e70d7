#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "loadshare/load_model.hpp"
#include "loadshare/rng.hpp"

using namespace loadshare;

namespace {

CustomerLoadComponent comp(int id, double mu_s, double sigma_s, double mu_u,
                           double sigma_u) {
    return {id, mu_s, sigma_s, mu_u, sigma_u};
}

TimestepLoadSet two_customer_set() {
    return TimestepLoadSet(
        0,
        {comp(1, 1.0, 1.0, 1.0, 0.5), comp(2, 1.0, 1.0, 1.0, 0.5)},
        {{1, 1.2}, {2, 0.8}});
}

}  // namespace

TEST_CASE("split_load applies the alpha/beta recipe") {
    const CustomerLoadComponent c = split_load(1, 2.0, 0.5, 1.0, 0.5);
    CHECK(c.mu_s == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.sigma_s == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.mu_u == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.sigma_u == doctest::Approx(0.5).epsilon(1e-15));

    const CustomerLoadComponent none = split_load(1, 2.0, 0.0, 1.0, 0.5);
    CHECK(none.mu_s == 0.0);
    CHECK(none.sigma_s == 0.0);
    CHECK(none.mu_u == 2.0);
    CHECK(none.sigma_u == 1.0);

    const CustomerLoadComponent zero = split_load(3, 0.0, 0.7, 1.0, 0.5);
    CHECK(zero.mu_s == 0.0);
    CHECK(zero.sigma_s == 0.0);
    CHECK(zero.mu_u == 0.0);
    CHECK(zero.sigma_u == 0.0);

    CHECK_THROWS_AS(split_load(1, -1.0, 0.5, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(split_load(1, 1.0, 1.5, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(split_load(1, 1.0, 0.5, -1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(split_load(1, 1.0, 0.5, 1.0, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(split_load(0, 1.0, 0.5, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("split_load conserves the measured total") {
    Rng rng(5u);
    for (int i = 0; i < 200; ++i) {
        const double mu = rng.next_uniform(0.0, 10.0);
        const double alpha = rng.next_unit();
        const CustomerLoadComponent c = split_load(1, mu, alpha, 1.0, 0.5);
        CHECK(std::fabs(c.mu_s + c.mu_u - mu) <= 1e-12);
    }
}

TEST_CASE("conditional_forecast worked example") {
    const TimestepLoadSet loads = two_customer_set();
    const GaussianDist f = conditional_forecast(loads, Coalition::of({1}));
    CHECK(f.mean == doctest::Approx(4.2).epsilon(1e-15));
    CHECK(f.variance == doctest::Approx(1.5).epsilon(1e-15));

    const GaussianDist none = conditional_forecast(loads, Coalition::empty());
    CHECK(none.mean == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(none.variance == doctest::Approx(2.5).epsilon(1e-15));

    const GaussianDist all = conditional_forecast(loads, Coalition::of({1, 2}));
    CHECK(all.mean == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(all.variance == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("conditional_forecast rejects bad coalitions") {
    const TimestepLoadSet loads = two_customer_set();
    CHECK_THROWS_AS(conditional_forecast(loads, Coalition::of({0, 1})),
                    std::invalid_argument);
    CHECK_THROWS_AS(conditional_forecast(loads, Coalition::of({3})),
                    std::invalid_argument);
    // A load set without full disclosures rejects forecasts that need them.
    const TimestepLoadSet partial(
        0, {comp(1, 1.0, 1.0, 1.0, 0.5), comp(2, 1.0, 1.0, 1.0, 0.5)},
        {{1, 1.2}});
    CHECK_NOTHROW(conditional_forecast(partial, Coalition::of({1})));
    CHECK_THROWS_AS(conditional_forecast(partial, Coalition::of({2})),
                    std::invalid_argument);
}

TEST_CASE("realized_demand_dist reduces to the fully disclosed forecast") {
    const TimestepLoadSet one(0, {comp(1, 1.5, 0.7, 1.0, 0.5)}, {{1, 2.0}});
    const GaussianDist d = realized_demand_dist(one);
    CHECK(d.mean == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(d.variance == doctest::Approx(0.25).epsilon(1e-15));

    const TimestepLoadSet empty(0, {}, {});
    const GaussianDist zero = realized_demand_dist(empty);
    CHECK(zero.mean == 0.0);
    CHECK(zero.variance == 0.0);

    const TimestepLoadSet loads = two_customer_set();
    const GaussianDist a = realized_demand_dist(loads);
    const GaussianDist b = conditional_forecast(loads, Coalition::of({1, 2}));
    CHECK(a.mean == b.mean);
    CHECK(a.variance == b.variance);
}

TEST_CASE("variance shrinks as the disclosing coalition grows") {
    Rng rng(31u);
    const int m = 6;
    std::vector<CustomerLoadComponent> comps;
    std::vector<DisclosedLoad> discs;
    for (int i = 1; i <= m; ++i) {
        comps.push_back(split_load(i, rng.next_uniform(0.1, 4.0),
                                   rng.next_unit(), 1.0, 0.5));
        discs.push_back({i, rng.next_uniform(0.0, 4.0)});
    }
    const TimestepLoadSet loads(0, comps, discs);
    const std::uint32_t subsets = 1u << m;
    std::vector<double> var(subsets);
    for (std::uint32_t s = 0; s < subsets; ++s) {
        var[s] = conditional_forecast(loads, Coalition(s << 1)).variance;
    }
    for (std::uint32_t s = 0; s < subsets; ++s) {
        for (int i = 0; i < m; ++i) {
            const std::uint32_t t = s | (1u << i);
            if (t == s) continue;
            CHECK(var[t] <= var[s] + 1e-12);
        }
    }
}

TEST_CASE("mean decomposition over the disclosing set") {
    Rng rng(32u);
    const int m = 5;
    std::vector<CustomerLoadComponent> comps;
    std::vector<DisclosedLoad> discs;
    for (int i = 1; i <= m; ++i) {
        comps.push_back(split_load(i, rng.next_uniform(0.1, 4.0),
                                   rng.next_unit(), 1.0, 0.5));
        discs.push_back({i, rng.next_uniform(-1.0, 4.0)});
    }
    const TimestepLoadSet loads(0, comps, discs);
    const double base = conditional_forecast(loads, Coalition::empty()).mean;
    for (std::uint32_t s = 0; s < (1u << m); ++s) {
        const Coalition t(s << 1);
        double expected = 0.0;
        for (int i = 1; i <= m; ++i) {
            if (t.contains(i)) {
                expected += loads.disclosed(i) - loads.component(i).mu_s;
            }
        }
        const double got = conditional_forecast(loads, t).mean - base;
        CHECK(got == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("load set construction validates its inputs") {
    CHECK_THROWS_AS(TimestepLoadSet(0, {comp(2, 1, 0, 1, 0)}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        TimestepLoadSet(0, {comp(1, 1, 0, 1, 0), comp(1, 1, 0, 1, 0)}, {}),
        std::invalid_argument);
    CHECK_THROWS_AS(TimestepLoadSet(0, {comp(1, 1, -1, 1, 0)}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(TimestepLoadSet(0, {comp(1, 1, 0, 1, 0)}, {{2, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        TimestepLoadSet(0, {comp(1, 1, 0, 1, 0)}, {{1, 1.0}, {1, 2.0}}),
        std::invalid_argument);
}
