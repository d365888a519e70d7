#include "loadshare/newsvendor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace loadshare {

Prices::Prices(double r_r, double r_w, double b_minus, double b_plus)
    : r_r(r_r), r_w(r_w), b_minus(b_minus), b_plus(b_plus) {
    if (!(std::isfinite(r_r) && std::isfinite(r_w) && std::isfinite(b_minus) &&
          std::isfinite(b_plus))) {
        throw std::invalid_argument("prices must be finite");
    }
    if (!(r_r > r_w)) {
        throw std::invalid_argument("retail price must exceed wholesale (r_r > r_w)");
    }
    if (!(b_minus >= r_w)) {
        throw std::invalid_argument("shortage price must be >= wholesale (b_minus >= r_w)");
    }
    if (!(b_plus <= r_w)) {
        throw std::invalid_argument("surplus price must be <= wholesale (b_plus <= r_w)");
    }
    if (!(b_minus > b_plus)) {
        throw std::invalid_argument("dual pricing requires b_minus > b_plus");
    }
}

const char* to_string(QuantityMethod m) {
    switch (m) {
        case QuantityMethod::quantile_rule: return "quantile_rule";
        case QuantityMethod::forecast_mean: return "forecast_mean";
        case QuantityMethod::grid_search: return "grid_search";
    }
    return "unknown";
}

double profit(double q, double d, const Prices& p) {
    const double shortage = std::max(d - q, 0.0);
    const double surplus = std::max(q - d, 0.0);
    return p.r_r * d - p.r_w * q - p.b_minus * shortage + p.b_plus * surplus;
}

double cost(double q, double d, const Prices& p) {
    const double shortage = std::max(d - q, 0.0);
    const double surplus = std::max(q - d, 0.0);
    return p.r_w * q + p.b_minus * shortage - p.b_plus * surplus;
}

double cost_ratio(const Prices& p) {
    if (p.b_minus == p.b_plus) {
        throw std::domain_error("degenerate pricing: b_minus equals b_plus");
    }
    return (p.b_minus - p.r_w) / (p.b_minus - p.b_plus);
}

QuantityDecision optimal_quantity(const GaussianDist& forecast,
                                  const Prices& p) {
    const double gamma = cost_ratio(p);
    if (forecast.variance == 0.0) {
        return {forecast.mean, QuantityMethod::quantile_rule};
    }
    if (gamma <= 0.0 || gamma >= 1.0) {
        throw std::domain_error(
            "cost ratio " + std::to_string(gamma) +
            " gives an unbounded quantile for a nondegenerate forecast");
    }
    const double q = forecast.mean + forecast.stddev() * std_quantile(gamma);
    return {q, QuantityMethod::quantile_rule};
}

double expected_profit_analytical(double q, const GaussianDist& realized,
                                  const Prices& p) {
    if (!std::isfinite(q)) {
        throw std::domain_error("quantity must be finite");
    }
    const double mu = realized.mean;
    const double e_short = partial_expectation_above(realized, q);
    const double e_surplus = e_short - (mu - q);  // E[max(q-D,0)]
    return p.r_r * mu - p.r_w * q - p.b_minus * e_short + p.b_plus * e_surplus;
}

McEstimate expected_profit_mc(double q, const GaussianDist& realized,
                              const Prices& p, std::int64_t n, Rng& rng) {
    if (n < 2) {
        throw std::invalid_argument("Monte Carlo needs n >= 2 samples");
    }
    // Welford accumulation: one pass, no sample storage.
    double mean = 0.0;
    double m2 = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = sample(realized, rng);
        const double h = profit(q, d, p);
        const double delta = h - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (h - mean);
    }
    const double variance = m2 / static_cast<double>(n - 1);
    return {mean, std::sqrt(std::max(variance, 0.0) / static_cast<double>(n))};
}

QuantityDecision grid_search_quantity(const GaussianDist& realized,
                                      const Prices& p, int n_grid,
                                      std::int64_t n_samples, double upper,
                                      std::uint64_t seed) {
    if (n_grid < 2) {
        throw std::invalid_argument("grid search needs n_grid >= 2");
    }
    if (!(upper > 0.0) || !std::isfinite(upper)) {
        throw std::invalid_argument("grid upper bound must be positive");
    }
    double best_q = 0.0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_grid; ++j) {
        const double q = upper * static_cast<double>(j) /
                         static_cast<double>(n_grid - 1);
        Rng rng = Rng::derive(seed, {stream_tag::grid_point,
                                     static_cast<std::uint64_t>(j)});
        const McEstimate est = expected_profit_mc(q, realized, p, n_samples, rng);
        if (est.estimate > best_value) {
            best_value = est.estimate;
            best_q = q;
        }
    }
    return {best_q, QuantityMethod::grid_search};
}

}  // namespace loadshare
