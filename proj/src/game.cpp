#include "loadshare/game.hpp"

#include <stdexcept>
#include <vector>

#include "loadshare/rng.hpp"

namespace loadshare {

namespace {

// Mean of H(q_t, d) - H(q_base, d) over shared samples d ~ realized.
// Common random numbers: the difference is what the game values, and sharing
// samples keeps it exactly zero when q_t == q_base.
double mc_value(double q_t, double q_base, const GaussianDist& realized,
                const Prices& p, std::int64_t n, Rng& rng) {
    if (n < 1) {
        throw std::invalid_argument("Monte Carlo engine needs n_samples >= 1");
    }
    double mean = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = sample(realized, rng);
        const double diff = profit(q_t, d, p) - profit(q_base, d, p);
        mean += (diff - mean) / static_cast<double>(i + 1);
    }
    return mean;
}

Rng coalition_stream(const EngineConfig& engine, std::uint32_t mask) {
    return Rng::derive(engine.master_seed,
                       {stream_tag::coalition_mc,
                        static_cast<std::uint64_t>(engine.timestep), mask});
}

}  // namespace

double coalition_value(Coalition t, const TimestepLoadSet& loads,
                       const Prices& p, const EngineConfig& engine) {
    if (!t.has_retailer()) return 0.0;
    const GaussianDist base_forecast =
        conditional_forecast(loads, Coalition::empty());
    const GaussianDist coalition_forecast =
        conditional_forecast(loads, t.customers());
    const double q_base = optimal_quantity(base_forecast, p).quantity;
    const double q_t = optimal_quantity(coalition_forecast, p).quantity;
    const GaussianDist realized = realized_demand_dist(loads);
    if (engine.kind == EngineConfig::Kind::analytical) {
        return expected_profit_analytical(q_t, realized, p) -
               expected_profit_analytical(q_base, realized, p);
    }
    Rng rng = coalition_stream(engine, t.mask());
    return mc_value(q_t, q_base, realized, p, engine.n_samples, rng);
}

ValueTable build_value_table(const TimestepLoadSet& loads, const Prices& p,
                             const EngineConfig& engine) {
    const int m = loads.customer_count();
    const int players = m + 1;
    ValueTable table(players);

    // Purchase quantity per customer subset; subset bit i-1 is customer i.
    const std::size_t n_subsets = std::size_t{1} << m;
    std::vector<double> quantity(n_subsets);
    for (std::size_t s = 0; s < n_subsets; ++s) {
        const Coalition customers(static_cast<std::uint32_t>(s) << 1);
        const GaussianDist forecast = conditional_forecast(loads, customers);
        quantity[s] = optimal_quantity(forecast, p).quantity;
    }

    const GaussianDist realized = realized_demand_dist(loads);
    if (engine.kind == EngineConfig::Kind::analytical) {
        std::vector<double> expected(n_subsets);
        for (std::size_t s = 0; s < n_subsets; ++s) {
            expected[s] = expected_profit_analytical(quantity[s], realized, p);
        }
        for (std::size_t s = 0; s < n_subsets; ++s) {
            const std::uint32_t mask = (static_cast<std::uint32_t>(s) << 1) | 1u;
            table.set_value(Coalition(mask), expected[s] - expected[0]);
        }
    } else {
        for (std::size_t s = 0; s < n_subsets; ++s) {
            const std::uint32_t mask = (static_cast<std::uint32_t>(s) << 1) | 1u;
            Rng rng = coalition_stream(engine, mask);
            table.set_value(Coalition(mask),
                            mc_value(quantity[s], quantity[0], realized, p,
                                     engine.n_samples, rng));
        }
    }
    return table;
}

}  // namespace loadshare
