// newsvendor.hpp: retailer economics: single-period profit under dual
// imbalance pricing, the cost-ratio quantile rule for the wholesale purchase,
// and analytical/Monte Carlo expected profit.

#pragma once

#include <cstdint>

#include "loadshare/gaussian.hpp"
#include "loadshare/rng.hpp"

namespace loadshare {

// Price quadruple (currency per kWh). Dual pricing scheme: shortage is
// settled at b_minus >= r_w, surplus refunded at b_plus <= r_w, so deviating
// from realized demand never pays.
struct Prices {
    double r_r;      // retail
    double r_w;      // wholesale
    double b_minus;  // shortage imbalance
    double b_plus;   // surplus imbalance

    Prices(double r_r, double r_w, double b_minus, double b_plus);
};

enum class QuantityMethod { quantile_rule, forecast_mean, grid_search };

const char* to_string(QuantityMethod m);

// Wholesale purchase decision. Quantity may be negative when disclosed loads
// are very negative; clipping is a reporting-layer policy, not done here.
struct QuantityDecision {
    double quantity = 0.0;
    QuantityMethod method = QuantityMethod::quantile_rule;
};

// Single-period profit: r_r*d - r_w*q - b_minus*max(d-q,0) + b_plus*max(q-d,0).
double profit(double q, double d, const Prices& p);

// Purchase-side cost, defined so that profit(q,d,p) = r_r*d - cost(q,d,p).
double cost(double q, double d, const Prices& p);

// Critical fractile gamma = (b_minus - r_w)/(b_minus - b_plus), in [0,1].
double cost_ratio(const Prices& p);

// q* = mu + sigma * std_quantile(gamma). Degenerate gamma in {0,1} with
// sigma > 0 has no finite optimum and is rejected.
QuantityDecision optimal_quantity(const GaussianDist& forecast,
                                  const Prices& p);

// Closed form of E[profit(q, D, p)] for D ~ realized.
double expected_profit_analytical(double q, const GaussianDist& realized,
                                  const Prices& p);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Sample mean of profit(q, D_i, p) over n draws from `realized`, with its
// standard error. Deterministic given the generator state.
McEstimate expected_profit_mc(double q, const GaussianDist& realized,
                              const Prices& p, std::int64_t n, Rng& rng);

// Argmax of expected_profit_mc over the even grid {upper * j/(n_grid-1)}.
// Each grid point draws from its own stream derived from (seed, j), so the
// result does not depend on evaluation order. Ties go to the lower quantity.
QuantityDecision grid_search_quantity(const GaussianDist& realized,
                                      const Prices& p, int n_grid,
                                      std::int64_t n_samples, double upper,
                                      std::uint64_t seed);

}  // namespace loadshare
