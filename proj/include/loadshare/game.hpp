// game.hpp: the data-sharing characteristic function: the expected profit
// gain the retailer obtains by re-optimizing its wholesale purchase with a
// coalition's disclosed schedulable loads.

#pragma once

#include <cstdint>

#include "loadshare/coalition.hpp"
#include "loadshare/load_model.hpp"
#include "loadshare/newsvendor.hpp"

namespace loadshare {

// How coalition values are evaluated. Analytical is the default: closed-form
// expectations make the table deterministic and order-independent. Monte
// Carlo derives one stream per (master_seed, timestep, coalition mask) and
// reuses the same demand samples for both terms of the value difference, so
// v({retailer}) stays exactly zero and sampling noise largely cancels.
struct EngineConfig {
    enum class Kind { analytical, monte_carlo };
    Kind kind = Kind::analytical;
    std::int64_t n_samples = 1000;
    std::uint64_t master_seed = 0;
    int timestep = 0;

    static EngineConfig analytical() { return {}; }
    static EngineConfig monte_carlo(std::int64_t n_samples,
                                    std::uint64_t master_seed, int timestep) {
        return {Kind::monte_carlo, n_samples, master_seed, timestep};
    }
};

// v(T): zero without the retailer, otherwise
// E[H(q*_{T minus retailer}, D_M)] - E[H(q*_empty, D_M)].
double coalition_value(Coalition t, const TimestepLoadSet& loads,
                       const Prices& p, const EngineConfig& engine);

// Populates v over all 2^(M+1) coalitions. Forecasts and purchase quantities
// are memoized per customer subset, so the retailer bit does not double work.
ValueTable build_value_table(const TimestepLoadSet& loads, const Prices& p,
                             const EngineConfig& engine);

}  // namespace loadshare
