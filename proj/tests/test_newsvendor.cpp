#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "loadshare/newsvendor.hpp"
#include "loadshare/rng.hpp"

using namespace loadshare;

namespace {

Prices reference_prices() { return Prices(0.10, 0.06, 0.16, 0.03); }

double quantile_oracle(double p) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("price invariants are enforced") {
    CHECK_NOTHROW(reference_prices());
    CHECK_THROWS_AS(Prices(0.05, 0.06, 0.16, 0.03), std::invalid_argument);
    CHECK_THROWS_AS(Prices(0.10, 0.06, 0.05, 0.03), std::invalid_argument);
    CHECK_THROWS_AS(Prices(0.10, 0.06, 0.16, 0.07), std::invalid_argument);
    CHECK_THROWS_AS(Prices(0.10, 0.06, 0.06, 0.06), std::invalid_argument);
    CHECK_THROWS_AS(Prices(0.10, 0.06, std::nan(""), 0.03),
                    std::invalid_argument);
}

TEST_CASE("profit and cost frozen cases") {
    const Prices p = reference_prices();
    CHECK(profit(100.0, 100.0, p) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(profit(90.0, 100.0, p) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(profit(0.0, 0.0, p) == 0.0);
    CHECK(cost(100.0, 100.0, p) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(cost(0.0, 100.0, p) == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("profit/cost duality and imbalance exclusivity") {
    const Prices p = reference_prices();
    Rng rng(11u);
    for (int i = 0; i < 500; ++i) {
        const double q = rng.next_uniform(-50.0, 150.0);
        const double d = rng.next_uniform(-50.0, 150.0);
        CHECK(profit(q, d, p) + cost(q, d, p) ==
              doctest::Approx(p.r_r * d).epsilon(1e-12));
        CHECK(std::max(d - q, 0.0) * std::max(q - d, 0.0) == 0.0);
    }
}

TEST_CASE("cost ratio") {
    CHECK(cost_ratio(reference_prices()) ==
          doctest::Approx(0.1 / 0.13).epsilon(1e-12));
    CHECK(cost_ratio(Prices(0.10, 0.06, 0.10, 0.02)) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cost_ratio(Prices(0.10, 0.06, 0.06, 0.03)) == 0.0);
}

TEST_CASE("optimal quantity follows the quantile rule") {
    const GaussianDist f(10.0, 4.0);
    const QuantityDecision mid =
        optimal_quantity(f, Prices(0.10, 0.06, 0.10, 0.02));
    CHECK(mid.quantity == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(mid.method == QuantityMethod::quantile_rule);

    const QuantityDecision q = optimal_quantity(f, reference_prices());
    const double expected = 10.0 + 2.0 * quantile_oracle(0.1 / 0.13);
    CHECK(q.quantity == doctest::Approx(expected).epsilon(1e-9));
    CHECK(q.quantity == doctest::Approx(11.473).epsilon(2e-4));

    CHECK(optimal_quantity(GaussianDist(10.0, 0.0), reference_prices()).quantity ==
          10.0);

    // gamma = 0 and gamma = 1 have no finite quantile for sigma > 0.
    const Prices gamma0(0.10, 0.06, 0.06, 0.03);
    const Prices gamma1(0.10, 0.06, 0.16, 0.06);
    CHECK_THROWS_AS(optimal_quantity(f, gamma0), std::domain_error);
    CHECK_THROWS_AS(optimal_quantity(f, gamma1), std::domain_error);
    CHECK(optimal_quantity(GaussianDist(10.0, 0.0), gamma0).quantity == 10.0);
}

TEST_CASE("optimal quantity is monotone in the cost ratio") {
    const GaussianDist f(10.0, 4.0);
    double prev = -1e300;
    for (double b_minus = 0.07; b_minus < 0.30; b_minus += 0.01) {
        const Prices p(0.10, 0.06, b_minus, 0.03);
        const double q = optimal_quantity(f, p).quantity;
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("analytical expected profit") {
    const Prices p = reference_prices();
    CHECK(expected_profit_analytical(7.0, GaussianDist(7.0, 0.0), p) ==
          doctest::Approx((0.10 - 0.06) * 7.0).epsilon(1e-12));
    const double pe = 0.7978845608028654;  // E[max(D-10,0)] for N(10,4)
    CHECK(expected_profit_analytical(10.0, GaussianDist(10.0, 4.0), p) ==
          doctest::Approx(0.4 - 0.13 * pe).epsilon(1e-10));
}

TEST_CASE("quantile rule maximizes the analytical expectation") {
    const Prices p = reference_prices();
    Rng rng(17u);
    for (int i = 0; i < 50; ++i) {
        const GaussianDist f(rng.next_uniform(1.0, 20.0),
                             rng.next_uniform(0.01, 9.0));
        const double q_star = optimal_quantity(f, p).quantity;
        const double best = expected_profit_analytical(q_star, f, p);
        for (double step : {0.01, 0.1, 1.0}) {
            const double delta = step * f.stddev();
            CHECK(expected_profit_analytical(q_star + delta, f, p) <=
                  best + 1e-12);
            CHECK(expected_profit_analytical(q_star - delta, f, p) <=
                  best + 1e-12);
        }
    }
}

TEST_CASE("Monte Carlo expected profit") {
    const Prices p = reference_prices();

    Rng degenerate(3u);
    const McEstimate exact =
        expected_profit_mc(9.0, GaussianDist(10.0, 0.0), p, 100, degenerate);
    CHECK(exact.estimate == doctest::Approx(profit(9.0, 10.0, p)).epsilon(1e-12));
    CHECK(exact.std_error == 0.0);

    Rng a(101u), b(101u);
    const McEstimate ea =
        expected_profit_mc(11.0, GaussianDist(10.0, 4.0), p, 5000, a);
    const McEstimate eb =
        expected_profit_mc(11.0, GaussianDist(10.0, 4.0), p, 5000, b);
    CHECK(ea.estimate == eb.estimate);
    CHECK(ea.std_error == eb.std_error);

    const double analytical =
        expected_profit_analytical(11.0, GaussianDist(10.0, 4.0), p);
    Rng c(55u);
    const McEstimate big =
        expected_profit_mc(11.0, GaussianDist(10.0, 4.0), p, 100000, c);
    CHECK(std::fabs(big.estimate - analytical) <= 4.0 * big.std_error);

    Rng d(1u);
    CHECK_THROWS_AS(expected_profit_mc(1.0, GaussianDist(1.0, 1.0), p, 1, d),
                    std::invalid_argument);
}

TEST_CASE("grid search argmax") {
    const Prices p = reference_prices();

    // Point mass: the nearest grid point wins.
    const QuantityDecision exact =
        grid_search_quantity(GaussianDist(10.0, 0.0), p, 101, 100, 20.0, 1u);
    CHECK(exact.quantity == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(exact.method == QuantityMethod::grid_search);

    // n_grid=2 keeps only the endpoints.
    const QuantityDecision tiny =
        grid_search_quantity(GaussianDist(18.0, 0.0), p, 2, 100, 20.0, 1u);
    CHECK(tiny.quantity == 20.0);

    // Dyadic symmetric prices make the endpoints tie bit-for-bit around a
    // midpoint mass; the tie must resolve to the lower quantity.
    const Prices sym(0.25, 0.125, 0.1875, 0.0625);
    const QuantityDecision tie =
        grid_search_quantity(GaussianDist(10.0, 0.0), sym, 2, 100, 20.0, 9u);
    CHECK(tie.quantity == 0.0);

    const QuantityDecision g1 =
        grid_search_quantity(GaussianDist(10.0, 1.0), p, 100, 1000, 20.0, 42u);
    const QuantityDecision g2 =
        grid_search_quantity(GaussianDist(10.0, 1.0), p, 100, 1000, 20.0, 42u);
    CHECK(g1.quantity == g2.quantity);

    CHECK_THROWS_AS(
        grid_search_quantity(GaussianDist(1.0, 1.0), p, 1, 10, 2.0, 1u),
        std::invalid_argument);
    CHECK_THROWS_AS(
        grid_search_quantity(GaussianDist(1.0, 1.0), p, 10, 10, -2.0, 1u),
        std::invalid_argument);
}
